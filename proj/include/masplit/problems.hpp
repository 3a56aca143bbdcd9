#pragma once

#include <string>
#include <vector>

#include "masplit/matfield.hpp"
#include "masplit/spectral.hpp"

namespace masplit {

/// Manufactured periodic Monge-Ampere problem u = eps sin(2 pi x) sin(2 pi y)
/// with f = det(I + D^2 u) synthesized at the nodes.
struct ManufacturedProblem {
  double epsilon = 0.0;
  int n = 0;
  ScalarField u_exact;
  SymMatrixField hessian_exact;
  ScalarField f;
  EllipticityReport report;
  std::vector<std::string> warnings;
};

/// Ellipticity of I + D^2 u is lost at eps = 1 / (4 pi^2).
double ellipticity_threshold();

/// n even and >= 16. Non-elliptic amplitudes are allowed and flagged in warnings.
ManufacturedProblem make_manufactured(double epsilon, int n);

double error_vs_exact(const SymMatrixField& p, const ManufacturedProblem& problem,
                      SobolevIndex s = SobolevIndex(0.0));
double error_vs_exact(const ScalarField& u, const ManufacturedProblem& problem,
                      SobolevIndex s = SobolevIndex(0.0));

}  // namespace masplit
