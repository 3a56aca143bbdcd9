#include "masplit/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "masplit/det_projection.hpp"
#include "masplit/errors.hpp"
#include "masplit/oracles.hpp"
#include "masplit/rng.hpp"
#include "masplit/spectral.hpp"

namespace masplit::validation {

namespace {

Check make_check(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value <= threshold};
}

// Random spd I + A with eigenvalues log-uniform in [0.1, 5], random rotation.
Sym2 random_spd_offset(Rng& rng) {
  const double l1 = std::exp(rng.uniform(std::log(0.1), std::log(5.0)));
  const double l2 = std::exp(rng.uniform(std::log(0.1), std::log(5.0)));
  const double theta = rng.uniform(-std::numbers::pi, std::numbers::pi);
  return rotate(Sym2::diag(l1, l2), theta) - Sym2::identity();
}

Sym2 random_sym(Rng& rng) {
  return {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
}

}  // namespace

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

SuiteResult det_projection_suite(SuiteOptions options) {
  const int cases = options.cases > 0 ? options.cases : 1000;
  Rng rng(options.seed);
  double worst_gap = -1e300, worst_det = 0.0, worst_equiv = 0.0, worst_idem = 0.0;
  double min_eig = 1e300, worst_matrix_gap = -1e300;
  for (int c = 0; c < cases; ++c) {
    const Sym2 a = random_spd_offset(rng);
    const double f = rng.uniform(0.5, 2.0);
    const Sym2 q = project_point(a, f);
    const double achieved = norm(a - q);

    const EigenPair e = eigen(Sym2::identity() + a);
    const auto ref = oracles::hyperbola_search(e.lam1, e.lam2, f);
    worst_gap = std::max(worst_gap, achieved - ref.distance);

    const Sym2 m = Sym2::identity() + q;
    worst_det = std::max(worst_det, std::abs(m.det() - f) / std::max(1.0, f));
    min_eig = std::min(min_eig, eigen(m).lam1);

    const double theta = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const Sym2 rotated = project_point(rotate(a, theta), f);
    worst_equiv = std::max(worst_equiv, norm(rotated - rotate(q, theta)));
    worst_idem = std::max(worst_idem, norm(project_point(q, f) - q));

    // The matrix-entry search is independent of the eigenvalue reduction.
    if (c % 10 == 0) {
      const auto direct = oracles::matrix_entry_search(a, f);
      worst_matrix_gap = std::max(worst_matrix_gap, achieved - direct.distance);
    }
  }
  SuiteResult r{"det-projection", {}};
  r.checks.push_back(make_check("distance - hyperbola oracle", worst_gap, 1e-8));
  r.checks.push_back(make_check("distance - matrix-entry oracle", worst_matrix_gap, 1e-8));
  r.checks.push_back(make_check("det residual / max(1, f)", worst_det, 1e-12));
  r.checks.push_back(make_check("-min eigenvalue of I + Q", -min_eig, 0.0));
  r.checks.push_back(make_check("rotation equivariance", worst_equiv, 1e-12));
  r.checks.push_back(make_check("idempotence", worst_idem, 1e-12));
  return r;
}

SuiteResult derivative_suite(SuiteOptions options) {
  const int cases = options.cases > 0 ? options.cases : 100;
  Rng rng(options.seed + 1);
  double worst_fd = 0.0, worst_tangent = 0.0, worst_normal = 0.0;
  for (int c = 0; c < cases; ++c) {
    const double f = rng.uniform(0.5, 2.0);
    const Sym2 feasible = project_point(random_spd_offset(rng), f);
    const Sym2 y = feasible + 0.05 * random_sym(rng);
    Sym2 h = random_sym(rng);
    h *= 1.0 / norm(h);

    const Sym2 exact = gateaux_dM(y, f, h);
    const Sym2 fd = oracles::fd_projection_derivative(y, f, h, 1e-5);
    worst_fd = std::max(worst_fd, norm(exact - fd) / std::max(norm(fd), 1e-300));

    // d = 0: the derivative is the tangent projector.
    const Sym2 at_base = gateaux_dM(feasible, f, h);
    const TangentProjector tangent(feasible);
    worst_tangent = std::max(worst_tangent, norm(at_base - tangent(h)));
    worst_normal = std::max(
        worst_normal, std::abs(frobenius(at_base, cof(Sym2::identity() + feasible))) /
                          norm(cof(Sym2::identity() + feasible)));
  }
  SuiteResult r{"derivative", {}};
  r.checks.push_back(make_check("relative error vs central differences", worst_fd, 1e-6));
  r.checks.push_back(make_check("d = 0 derivative - tangent projector", worst_tangent, 1e-12));
  r.checks.push_back(make_check("d = 0 output . unit normal", worst_normal, 1e-12));
  return r;
}

SuiteResult spectral_suite(SuiteOptions options) {
  const int cases = options.cases > 0 ? options.cases : 100;
  const int n = 32;
  Rng rng(options.seed + 2);
  const SobolevIndex l2(0.0);

  double roundtrip = 0.0, parseval = 0.0, idem = 0.0, adjoint = 0.0, expansion = 0.0;
  double attained = 0.0;
  for (int c = 0; c < cases; ++c) {
    const ScalarField s = random_scalar_field(n, rng);
    const ScalarField back = idft(dft(s));
    roundtrip = std::max(roundtrip, (back - s).max_abs() / s.max_abs());
    double mean_sq = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) mean_sq += s[k] * s[k];
    mean_sq /= static_cast<double>(s.size());
    const double spec = sobolev_norm(s, l2);
    parseval = std::max(parseval, std::abs(spec * spec - mean_sq) / mean_sq);

    const SymMatrixField a = random_matrix_field(n, rng);
    const SymMatrixField b = random_matrix_field(n, rng);
    const SymMatrixField pa = project_onto_V(a).hessian;
    const SymMatrixField ppa = project_onto_V(pa).hessian;
    idem = std::max(idem, sobolev_norm(ppa - pa, l2) / sobolev_norm(a, l2));

    for (double m : {0.0, 1.0, 2.0}) {
      const SobolevIndex sm(m);
      const SymMatrixField pb = project_onto_V(b, sm).hessian;
      const double lhs = inner_product(pa, b, sm);
      const double rhs = inner_product(a, pb, sm);
      adjoint = std::max(adjoint, std::abs(lhs - rhs) /
                                      (sobolev_norm(a, sm) * sobolev_norm(b, sm)));
      expansion = std::max(expansion, sobolev_norm(pa, sm) / sobolev_norm(a, sm) - 1.0);
      attained = std::max(attained, 1.0 - sobolev_norm(project_onto_V(pa, sm).hessian, sm) /
                                              sobolev_norm(pa, sm));
    }
  }
  SuiteResult r{"spectral", {}};
  r.checks.push_back(make_check("dft round trip (relative max)", roundtrip, 1e-12));
  r.checks.push_back(make_check("Parseval (relative)", parseval, 1e-12));
  r.checks.push_back(make_check("Pi_V idempotence", idem, 1e-12));
  r.checks.push_back(make_check("Pi_V self-adjointness, m = 0,1,2", adjoint, 1e-10));
  r.checks.push_back(make_check("|Pi_V X|_m / |X|_m - 1, m = 0,1,2", expansion, 1e-10));
  r.checks.push_back(make_check("1 - |Pi_V H|_m / |H|_m on Hessians", attained, 1e-10));
  return r;
}

SuiteResult interpolation_suite(SuiteOptions options) {
  const int cases = options.cases > 0 ? options.cases : 100;
  Rng rng(options.seed + 3);
  double worst = -1e300;
  for (int c = 0; c < cases; ++c) {
    const int n = (c % 2 == 0) ? 16 : 32;
    const SymMatrixField x = c % 3 == 0 ? smooth_random_matrix_field(n, rng, 3, 1.0)
                                        : random_matrix_field(n, rng);
    const auto norms = sobolev_norms(x, {0.0, 1.5, 2.0});
    const double bound = std::pow(norms[0], 0.25) * std::pow(norms[2], 0.75);
    worst = std::max(worst, (norms[1] - bound) / bound);
  }
  SuiteResult r{"interpolation", {}};
  r.checks.push_back(make_check("(|X|_{3/2} - |X|_0^{1/4}|X|_2^{3/4}) / rhs", worst, 1e-12));
  return r;
}

SuiteResult matfield_suite(SuiteOptions options) {
  const int cases = options.cases > 0 ? options.cases : 1000;
  Rng rng(options.seed + 4);
  double recon = 0.0, cofactor = 0.0, range = 0.0;
  for (int c = 0; c < cases; ++c) {
    const Sym2 m{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    const EigenPair e = eigen(m);
    recon = std::max(recon, norm(e.reconstruct() - m) / std::max(norm(m), 1e-300));
    cofactor = std::max(cofactor, std::abs(frobenius(m, cof(m)) - 2.0 * m.det()) /
                                      std::max(1.0, frobenius(m, m)));
    const bool ok = e.lam1 <= e.lam2 && e.rot > -std::numbers::pi / 4 &&
                    e.rot <= std::numbers::pi / 4;
    range = std::max(range, ok ? 0.0 : 1.0);
  }
  SuiteResult r{"matfield", {}};
  r.checks.push_back(make_check("eigen reconstruction (relative)", recon, 1e-13));
  r.checks.push_back(make_check("M : cof M - 2 det M", cofactor, 1e-13));
  r.checks.push_back(make_check("ordering / canonical angle violations", range, 0.0));
  return r;
}

std::vector<std::string> suite_names() {
  return {"det-projection", "derivative", "spectral", "interpolation", "matfield"};
}

SuiteResult run_suite(const std::string& name, SuiteOptions options) {
  if (name == "det-projection") return det_projection_suite(options);
  if (name == "derivative") return derivative_suite(options);
  if (name == "spectral") return spectral_suite(options);
  if (name == "interpolation") return interpolation_suite(options);
  if (name == "matfield") return matfield_suite(options);
  throw InvalidArgument("unknown validation suite: " + name);
}

}  // namespace masplit::validation
