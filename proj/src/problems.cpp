#include "masplit/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "masplit/errors.hpp"

namespace masplit {

double ellipticity_threshold() { return 1.0 / (4.0 * std::numbers::pi * std::numbers::pi); }

ManufacturedProblem make_manufactured(double epsilon, int n) {
  require_grid_size(n);
  if (n < 16) throw InvalidArgument("manufactured problems need n >= 16");
  if (!std::isfinite(epsilon)) throw InvalidArgument("epsilon must be finite");

  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double c = two_pi * two_pi * epsilon;

  ManufacturedProblem mp;
  mp.epsilon = epsilon;
  mp.n = n;
  mp.u_exact = ScalarField::sample(
      n, [&](double x, double y) { return epsilon * std::sin(two_pi * x) * std::sin(two_pi * y); });
  const ScalarField diag = ScalarField::sample(
      n, [&](double x, double y) { return -c * std::sin(two_pi * x) * std::sin(two_pi * y); });
  const ScalarField mixed = ScalarField::sample(
      n, [&](double x, double y) { return c * std::cos(two_pi * x) * std::cos(two_pi * y); });
  mp.hessian_exact = SymMatrixField(diag, mixed, diag);
  mp.f = det_field(mp.hessian_exact, true);
  mp.report = ellipticity_report(mp.hessian_exact);

  if (std::abs(epsilon) >= ellipticity_threshold()) {
    mp.warnings.push_back("epsilon = " + std::to_string(epsilon) +
                          " is outside the ellipticity window |eps| < 1/(4 pi^2)");
  }
  if (!mp.report.elliptic) mp.warnings.push_back("I + D^2 u is not positive definite everywhere");
  double fmin = mp.f[0];
  for (std::size_t k = 0; k < mp.f.size(); ++k) fmin = std::min(fmin, mp.f[k]);
  if (!(fmin > 0.0)) mp.warnings.push_back("f is not positive at every node");
  return mp;
}

double error_vs_exact(const SymMatrixField& p, const ManufacturedProblem& problem, SobolevIndex s) {
  require_same_grid(p.n(), problem.n, "error_vs_exact");
  return sobolev_norm(p - problem.hessian_exact, s);
}

double error_vs_exact(const ScalarField& u, const ManufacturedProblem& problem, SobolevIndex s) {
  require_same_grid(u.n(), problem.n, "error_vs_exact");
  return sobolev_norm(u - problem.u_exact, s);
}

}  // namespace masplit
