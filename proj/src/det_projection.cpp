#include "masplit/det_projection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "masplit/errors.hpp"

namespace masplit {

namespace {

// Medial-axis detection: equal eigenvalues and a mean beyond 2 sqrt(f).
constexpr double kTieGap = 1e-14;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Sym2 <-> R^3 with the Frobenius metric: (a11, sqrt2 a12, a22).
using Vec3 = std::array<double, 3>;

Vec3 to_vec(const Sym2& m) { return {m.a11, std::numbers::sqrt2 * m.a12, m.a22}; }
Sym2 from_vec(const Vec3& v) { return {v[0], v[1] / std::numbers::sqrt2, v[2]}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace

HyperbolaProjection project_eigenvalues(double m1, double m2, double f,
                                        ProjectionOptions options) {
  if (!(f > 0.0) || !std::isfinite(f)) {
    throw InfeasibleConstraint("determinant target must be positive, got " + fmt(f));
  }
  if (!std::isfinite(m1) || !std::isfinite(m2)) {
    throw InvalidArgument("eigenvalues must be finite");
  }
  if (m1 > m2) std::swap(m1, m2);

  const double a = 0.5 * (m1 + m2);
  const double b = 0.5 * (m2 - m1);
  const double root_f = std::sqrt(f);

  HyperbolaProjection out;
  double d = 0.0;
  if (b <= kTieGap * std::max(1.0, std::abs(a)) && a > 2.0 * root_f * (1.0 + 1e-12)) {
    if (options.ties == TiePolicy::Reject) {
      throw AmbiguousProjection("eigenvalues (" + fmt(m1) + ", " + fmt(m2) +
                                ") lie on the medial axis of det = " + fmt(f));
    }
    // h(d) = 2d - a d / s - b with b ~ 0: the positive root has s = a / 2.
    d = std::sqrt(0.25 * a * a - f);
    out.tie_broken = true;
  } else {
    auto h = [&](double t) { return 2.0 * t - a * t / std::sqrt(f + t * t) - b; };
    auto dh = [&](double t) {
      const double s2 = f + t * t;
      return 2.0 - a * f / (s2 * std::sqrt(s2));
    };
    double lo = 0.0;
    double hi = 0.5 * (std::max(a, 0.0) + b);
    d = hi;
    bool done = b == 0.0;  // a <= 2 sqrt(f): d = 0 is the minimizer
    if (done) d = 0.0;
    for (int it = 0; !done && it < options.max_iterations; ++it) {
      out.iterations = it + 1;
      const double hv = h(d);
      if (hv <= 0.0) {
        lo = d;
        if (hv == 0.0) break;
      } else {
        hi = d;
      }
      const double slope = dh(d);
      double next = d - hv / slope;
      if (!(slope > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - d) <= 1e-15 * std::max(d, root_f)) {
        d = next;
        done = true;
        break;
      }
      d = next;
    }
    if (!done && out.iterations >= options.max_iterations &&
        std::abs(h(d)) > 1e-10 * std::max({1.0, std::abs(a), b})) {
      throw NonConvergence("hyperbola projection did not converge for (" + fmt(m1) + ", " +
                           fmt(m2) + "), f = " + fmt(f));
    }
  }

  const double s = std::sqrt(f + d * d);
  out.y = s + d;
  out.x = f / out.y;  // avoids cancellation in s - d
  out.residual = std::abs(out.x * out.y - f);
  // Least-squares multiplier for the two stationarity equations.
  out.mu = ((out.x - m1) * out.y + (out.y - m2) * out.x) / (out.x * out.x + out.y * out.y);
  return out;
}

PointProjection project_point_detail(const Sym2& a, double f, ProjectionOptions options) {
  const EigenPair e = eigen(Sym2::identity() + a);
  PointProjection p;
  p.detail = project_eigenvalues(e.lam1, e.lam2, f, options);
  p.q = e.reconstruct_with(p.detail.x, p.detail.y) - Sym2::identity();
  return p;
}

Sym2 project_point(const Sym2& a, double f, ProjectionOptions options) {
  return project_point_detail(a, f, options).q;
}

FieldProjection project_field(const SymMatrixField& x, const ScalarField& f,
                              ProjectionOptions options) {
  require_same_grid(x.n(), f.n(), "project_field");
  const int n = x.n();
  FieldProjection out{SymMatrixField(n), {}};
  std::vector<NodeFailure> failures;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n + j;
      try {
        const PointProjection p = project_point_detail(x.at(k), f[k], options);
        out.q.set(k, p.q);
        const double det = (1.0 + p.q.a11) * (1.0 + p.q.a22) - p.q.a12 * p.q.a12;
        out.report.max_residual = std::max(out.report.max_residual, std::abs(det - f[k]));
        out.report.max_iterations = std::max(out.report.max_iterations, p.detail.iterations);
        if (p.detail.tie_broken) ++out.report.ties_broken;
      } catch (const Error& err) {
        std::string kind = "Error";
        if (dynamic_cast<const AmbiguousProjection*>(&err)) kind = "AmbiguousProjection";
        else if (dynamic_cast<const NonConvergence*>(&err)) kind = "NonConvergence";
        else if (dynamic_cast<const InfeasibleConstraint*>(&err)) kind = "InfeasibleConstraint";
        failures.push_back({i, j, static_cast<double>(i) / n, static_cast<double>(j) / n,
                            kind, err.what()});
      }
    }
  }
  if (!failures.empty()) throw FieldOperationError(std::move(failures));
  return out;
}

TangentProjector::TangentProjector(const Sym2& base) : base_(base) {
  const Sym2 c = cof(Sym2::identity() + base);
  const double len = norm(c);
  if (!(len > 0.0)) throw InvalidArgument("cof(I + Q) vanishes; no tangent plane");
  normal_ = (1.0 / len) * c;
}

Sym2 shape_operator(const Sym2& q, const Sym2& h) {
  const Sym2 inv = inverse(Sym2::identity() + q);
  const TangentProjector tangent(q);
  return (1.0 / norm(inv)) * tangent(sandwich(inv, h));
}

DerivativeDetail gateaux_dM_detail(const Sym2& y, double f, const Sym2& h,
                                   ProjectionOptions options) {
  DerivativeDetail out;
  out.projection = project_point(y, f, options);
  const TangentProjector tangent(out.projection);

  const double gap = norm(y - out.projection);
  const double det_y = (Sym2::identity() + y).det();
  out.distance = det_y > f ? gap : -gap;

  // Orthonormal tangent basis: Gram-Schmidt against the unit normal.
  const Vec3 nrm = to_vec(tangent.normal());
  Vec3 seed{1.0, 0.0, 0.0};
  {
    // Pick the coordinate axis least aligned with the normal.
    int best = 0;
    for (int c = 1; c < 3; ++c) {
      if (std::abs(nrm[c]) < std::abs(nrm[best])) best = c;
    }
    seed = {0.0, 0.0, 0.0};
    seed[best] = 1.0;
  }
  auto orthonormalize = [&](Vec3 v, const Vec3* against) {
    double c = dot(v, nrm);
    for (int i = 0; i < 3; ++i) v[i] -= c * nrm[i];
    if (against != nullptr) {
      c = dot(v, *against);
      for (int i = 0; i < 3; ++i) v[i] -= c * (*against)[i];
    }
    const double len = std::sqrt(dot(v, v));
    for (double& x : v) x /= len;
    return v;
  };
  const Vec3 e1 = orthonormalize(seed, nullptr);
  const Vec3 e2 = orthonormalize(
      {nrm[1] * e1[2] - nrm[2] * e1[1], nrm[2] * e1[0] - nrm[0] * e1[2],
       nrm[0] * e1[1] - nrm[1] * e1[0]},
      &e1);

  const Sym2 b1 = from_vec(e1);
  const Sym2 b2 = from_vec(e2);
  const Vec3 l1 = to_vec(shape_operator(out.projection, b1));
  const Vec3 l2 = to_vec(shape_operator(out.projection, b2));
  // Matrix of L in (e1, e2); symmetric up to rounding.
  const double L11 = dot(e1, l1);
  const double L12 = 0.5 * (dot(e1, l2) + dot(e2, l1));
  const double L22 = dot(e2, l2);
  const double mean = 0.5 * (L11 + L22);
  const double rad = std::hypot(0.5 * (L11 - L22), L12);
  out.shape_norm = std::max(std::abs(mean - rad), std::abs(mean + rad));

  const double t = out.distance;
  if (t * out.shape_norm >= 1.0) {
    throw ContractivityViolated("d*|L| = " + fmt(t * out.shape_norm) + " >= 1");
  }

  const Vec3 hv = to_vec(h);
  const double r1 = dot(e1, hv);
  const double r2 = dot(e2, hv);
  // Solve (I - t L) c = r on the tangent plane.
  const double m11 = 1.0 - t * L11;
  const double m12 = -t * L12;
  const double m22 = 1.0 - t * L22;
  const double det = m11 * m22 - m12 * m12;
  const double c1 = (m22 * r1 - m12 * r2) / det;
  const double c2 = (m11 * r2 - m12 * r1) / det;
  out.value = c1 * b1 + c2 * b2;
  return out;
}

Sym2 gateaux_dM(const Sym2& y, double f, const Sym2& h, ProjectionOptions options) {
  return gateaux_dM_detail(y, f, h, options).value;
}

SymMatrixField gateaux_dM_field(const SymMatrixField& y, const ScalarField& f,
                                const SymMatrixField& h, ProjectionOptions options) {
  require_same_grid(y.n(), f.n(), "gateaux_dM_field");
  require_same_grid(y.n(), h.n(), "gateaux_dM_field");
  const int n = y.n();
  SymMatrixField out(n);
  std::vector<NodeFailure> failures;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n + j;
      try {
        out.set(k, gateaux_dM(y.at(k), f[k], h.at(k), options));
      } catch (const Error& err) {
        std::string kind = "Error";
        if (dynamic_cast<const ContractivityViolated*>(&err)) kind = "ContractivityViolated";
        else if (dynamic_cast<const AmbiguousProjection*>(&err)) kind = "AmbiguousProjection";
        failures.push_back({i, j, static_cast<double>(i) / n, static_cast<double>(j) / n,
                            kind, err.what()});
      }
    }
  }
  if (!failures.empty()) throw FieldOperationError(std::move(failures));
  return out;
}

Sym2 fd_derivative_in_f(const Sym2& a, double f, double step, ProjectionOptions options) {
  const Sym2 plus = project_point(a, f + step, options);
  const Sym2 minus = project_point(a, f - step, options);
  return (0.5 / step) * (plus - minus);
}

}  // namespace masplit
