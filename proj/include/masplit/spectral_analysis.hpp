#pragma once

#include <cstdint>

#include "masplit/matfield.hpp"

namespace masplit {

/// Nodewise removal of the component along cof(I + P) / |cof(I + P)|.
SymMatrixField project_tangent_field(const SymMatrixField& p, const SymMatrixField& x);

/// Pi_ker(cof(I + P)) (Pi_V X): linearization of T at a solution.
SymMatrixField apply_linearized_T(const SymMatrixField& p, const SymMatrixField& x);

struct OperatorNormEstimate {
  double rho0 = 0.0;
  int iterations = 0;
  double residual = 0.0;  // relative change of the Rayleigh quotient at exit
  bool slow_convergence = false;
  SymMatrixField witness;  // unit L^2 norm
};

struct PowerIterationOptions {
  double tolerance = 1e-10;
  int max_iterations = 10000;
};

/// Power iteration on the self-adjoint Pi_V Pi_ker Pi_V, whose top eigenvalue
/// is rho0^2 = |Pi_ker Pi_V|^2. Requires I + P spd at every node.
OperatorNormEstimate estimate_rho0(const SymMatrixField& p, std::uint64_t seed,
                                   PowerIterationOptions options = {});

/// kappa / sqrt(1 + kappa^2); kappa >= 1.
double rate_bound(double kappa);

}  // namespace masplit
