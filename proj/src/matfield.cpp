#include "masplit/matfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "masplit/errors.hpp"

namespace masplit {

Sym2& Sym2::operator+=(const Sym2& o) noexcept {
  a11 += o.a11;
  a12 += o.a12;
  a22 += o.a22;
  return *this;
}

Sym2& Sym2::operator-=(const Sym2& o) noexcept {
  a11 -= o.a11;
  a12 -= o.a12;
  a22 -= o.a22;
  return *this;
}

Sym2& Sym2::operator*=(double s) noexcept {
  a11 *= s;
  a12 *= s;
  a22 *= s;
  return *this;
}

Sym2 operator+(Sym2 a, const Sym2& b) noexcept { return a += b; }
Sym2 operator-(Sym2 a, const Sym2& b) noexcept { return a -= b; }
Sym2 operator*(double s, Sym2 a) noexcept { return a *= s; }

double frobenius(const Sym2& a, const Sym2& b) noexcept {
  return a.a11 * b.a11 + 2.0 * a.a12 * b.a12 + a.a22 * b.a22;
}

double norm(const Sym2& a) noexcept { return std::sqrt(frobenius(a, a)); }

Sym2 cof(const Sym2& m) noexcept { return {m.a22, -m.a12, m.a11}; }

Sym2 inverse(const Sym2& m) noexcept {
  const double inv_det = 1.0 / m.det();
  return inv_det * cof(m);
}

Sym2 sandwich(const Sym2& a, const Sym2& b) noexcept {
  // (A B) first, then (A B) A; symmetric because A and B are.
  const double ab11 = a.a11 * b.a11 + a.a12 * b.a12;
  const double ab12 = a.a11 * b.a12 + a.a12 * b.a22;
  const double ab21 = a.a12 * b.a11 + a.a22 * b.a12;
  const double ab22 = a.a12 * b.a12 + a.a22 * b.a22;
  return {ab11 * a.a11 + ab12 * a.a12, ab11 * a.a12 + ab12 * a.a22,
          ab21 * a.a12 + ab22 * a.a22};
}

Sym2 rotate(const Sym2& m, double theta) noexcept {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  // R M R^T with R = [[c, -s], [s, c]]
  const double r11 = c * m.a11 - s * m.a12;
  const double r12 = c * m.a12 - s * m.a22;
  const double r21 = s * m.a11 + c * m.a12;
  const double r22 = s * m.a12 + c * m.a22;
  return {r11 * c - r12 * s, r11 * s + r12 * c, r21 * s + r22 * c};
}

Sym2 EigenPair::reconstruct_with(double l1, double l2) const noexcept {
  const double d1 = major_first ? l2 : l1;
  const double d2 = major_first ? l1 : l2;
  return rotate(Sym2::diag(d1, d2), rot);
}

EigenPair eigen(const Sym2& m) noexcept {
  constexpr double quarter = std::numbers::pi / 4.0;
  const double mean = 0.5 * (m.a11 + m.a22);
  const double half_diff = 0.5 * (m.a11 - m.a22);
  const double radius = std::hypot(half_diff, m.a12);

  EigenPair e;
  e.lam1 = mean - radius;
  e.lam2 = mean + radius;
  if (radius == 0.0) return e;

  // Angle of the lam2 eigenvector, in (-pi/2, pi/2].
  const double major = 0.5 * std::atan2(m.a12, half_diff);
  if (major > -quarter && major <= quarter) {
    e.rot = major;
    e.major_first = true;
  } else {
    e.rot = major > 0.0 ? major - 2.0 * quarter : major + 2.0 * quarter;
    e.major_first = false;
  }
  return e;
}

SymMatrixField::SymMatrixField(int n) : p11(n), p12(n), p22(n) {}

SymMatrixField::SymMatrixField(ScalarField a11, ScalarField a12, ScalarField a22)
    : p11(std::move(a11)), p12(std::move(a12)), p22(std::move(a22)) {
  require_same_grid(p11.n(), p12.n(), "SymMatrixField");
  require_same_grid(p11.n(), p22.n(), "SymMatrixField");
}

SymMatrixField SymMatrixField::constant(int n, const Sym2& value) {
  SymMatrixField out(n);
  for (std::size_t k = 0; k < out.size(); ++k) out.set(k, value);
  return out;
}

double SymMatrixField::max_abs() const {
  return std::max({p11.max_abs(), p12.max_abs(), p22.max_abs()});
}

SymMatrixField& SymMatrixField::operator+=(const SymMatrixField& other) {
  p11 += other.p11;
  p12 += other.p12;
  p22 += other.p22;
  return *this;
}

SymMatrixField& SymMatrixField::operator-=(const SymMatrixField& other) {
  p11 -= other.p11;
  p12 -= other.p12;
  p22 -= other.p22;
  return *this;
}

SymMatrixField& SymMatrixField::operator*=(double s) {
  p11 *= s;
  p12 *= s;
  p22 *= s;
  return *this;
}

SymMatrixField operator+(SymMatrixField a, const SymMatrixField& b) { return a += b; }
SymMatrixField operator-(SymMatrixField a, const SymMatrixField& b) { return a -= b; }
SymMatrixField operator*(double s, SymMatrixField a) { return a *= s; }

ScalarField det_field(const SymMatrixField& p, bool shift_identity) {
  ScalarField out(p.n());
  const double shift = shift_identity ? 1.0 : 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    out[k] = (shift + p.p11[k]) * (shift + p.p22[k]) - p.p12[k] * p.p12[k];
  }
  return out;
}

EllipticityReport ellipticity_report(const SymMatrixField& p) {
  EllipticityReport r;
  r.nu1 = std::numeric_limits<double>::infinity();
  r.nu2 = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p.size(); ++k) {
    const EigenPair e = eigen(Sym2::identity() + p.at(k));
    r.nu1 = std::min(r.nu1, e.lam1);
    r.nu2 = std::max(r.nu2, e.lam2);
  }
  r.elliptic = r.nu1 > 0.0;
  r.kappa = r.elliptic ? r.nu2 / r.nu1 : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace masplit
