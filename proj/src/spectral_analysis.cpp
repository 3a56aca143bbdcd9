#include "masplit/spectral_analysis.hpp"

#include <cmath>
#include <string>

#include "masplit/det_projection.hpp"
#include "masplit/errors.hpp"
#include "masplit/rng.hpp"
#include "masplit/spectral.hpp"

namespace masplit {

SymMatrixField project_tangent_field(const SymMatrixField& p, const SymMatrixField& x) {
  require_same_grid(p.n(), x.n(), "project_tangent_field");
  SymMatrixField out(x.n());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const Sym2 c = cof(Sym2::identity() + p.at(k));
    const double len_sq = frobenius(c, c);
    if (!(len_sq > 0.0)) {
      throw InvalidArgument("cof(I + P) vanishes at node " + std::to_string(k));
    }
    const Sym2 xv = x.at(k);
    out.set(k, xv - (frobenius(xv, c) / len_sq) * c);
  }
  return out;
}

SymMatrixField apply_linearized_T(const SymMatrixField& p, const SymMatrixField& x) {
  return project_tangent_field(p, project_onto_V(x).hessian);
}

OperatorNormEstimate estimate_rho0(const SymMatrixField& p, std::uint64_t seed,
                                   PowerIterationOptions options) {
  const EllipticityReport report = ellipticity_report(p);
  if (!report.elliptic) {
    throw InvalidArgument("I + P must be positive definite at every node (nu1 = " +
                          std::to_string(report.nu1) + ")");
  }
  const SobolevIndex l2(0.0);
  Rng rng(seed);
  SymMatrixField x = project_onto_V(random_matrix_field(p.n(), rng)).hessian;
  double len = sobolev_norm(x, l2);
  if (!(len > 0.0)) throw InvalidArgument("degenerate random start");
  x *= 1.0 / len;

  OperatorNormEstimate est;
  double lambda = 0.0;
  est.residual = 1.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    // A = Pi_V Pi_ker Pi_V; x already lies in V.
    SymMatrixField y = project_onto_V(project_tangent_field(p, x)).hessian;
    const double next = inner_product(x, y, l2);
    est.iterations = it;
    est.residual = lambda > 0.0 ? std::abs(next - lambda) / next : 1.0;
    lambda = next;
    len = sobolev_norm(y, l2);
    if (!(len > 0.0)) {
      // x is annihilated: the operator vanishes on the start vector.
      est.residual = 0.0;
      break;
    }
    x = (1.0 / len) * std::move(y);
    if (it > 1 && est.residual < options.tolerance) break;
  }
  est.slow_convergence = est.residual >= options.tolerance;
  est.rho0 = std::sqrt(std::max(lambda, 0.0));
  est.witness = std::move(x);
  return est;
}

double rate_bound(double kappa) {
  if (!(kappa >= 1.0)) {
    throw InvalidArgument("kappa must be >= 1, got " + std::to_string(kappa));
  }
  if (std::isinf(kappa)) return 1.0;
  return kappa / std::sqrt(1.0 + kappa * kappa);
}

}  // namespace masplit
