#pragma once

#include "masplit/field.hpp"

namespace masplit {

/// Symmetric 2x2 matrix [[a11, a12], [a12, a22]].
struct Sym2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  static constexpr Sym2 identity() { return {1.0, 0.0, 1.0}; }
  static constexpr Sym2 diag(double d1, double d2) { return {d1, 0.0, d2}; }

  double trace() const noexcept { return a11 + a22; }
  double det() const noexcept { return a11 * a22 - a12 * a12; }

  Sym2& operator+=(const Sym2& o) noexcept;
  Sym2& operator-=(const Sym2& o) noexcept;
  Sym2& operator*=(double s) noexcept;
};

Sym2 operator+(Sym2 a, const Sym2& b) noexcept;
Sym2 operator-(Sym2 a, const Sym2& b) noexcept;
Sym2 operator*(double s, Sym2 a) noexcept;

/// Frobenius product A : B.
double frobenius(const Sym2& a, const Sym2& b) noexcept;
/// Frobenius norm |A|.
double norm(const Sym2& a) noexcept;
/// cof([[a, b], [b, c]]) = [[c, -b], [-b, a]].
Sym2 cof(const Sym2& m) noexcept;
/// Inverse; caller guarantees det != 0.
Sym2 inverse(const Sym2& m) noexcept;
/// A * B * A for symmetric A, B (result is symmetric).
Sym2 sandwich(const Sym2& a, const Sym2& b) noexcept;
/// R(theta) * M * R(theta)^T.
Sym2 rotate(const Sym2& m, double theta) noexcept;

/// Closed-form eigendecomposition of a symmetric 2x2 matrix.
///
/// lam1 <= lam2. The matrix equals R(rot) diag(d1, d2) R(rot)^T with
/// rot in (-pi/4, pi/4]; (d1, d2) = (lam2, lam1) when major_first is set and
/// (lam1, lam2) otherwise. Equal eigenvalues give rot = 0, major_first = false.
struct EigenPair {
  double lam1 = 0.0;
  double lam2 = 0.0;
  double rot = 0.0;
  bool major_first = false;

  /// Matrix with the same eigenbasis and eigenvalues replaced by (l1, l2),
  /// where l1 goes on the lam1 eigenvector.
  Sym2 reconstruct_with(double l1, double l2) const noexcept;
  Sym2 reconstruct() const noexcept { return reconstruct_with(lam1, lam2); }
};

EigenPair eigen(const Sym2& m) noexcept;

/// Symmetric 2x2 matrix field; only the upper triangle is stored.
class SymMatrixField {
 public:
  SymMatrixField() = default;
  explicit SymMatrixField(int n);
  SymMatrixField(ScalarField p11, ScalarField p12, ScalarField p22);

  static SymMatrixField constant(int n, const Sym2& value);

  int n() const noexcept { return p11.n(); }
  std::size_t size() const noexcept { return p11.size(); }

  Sym2 at(std::size_t k) const noexcept { return {p11[k], p12[k], p22[k]}; }
  Sym2 at(int i, int j) const noexcept { return {p11(i, j), p12(i, j), p22(i, j)}; }
  void set(std::size_t k, const Sym2& v) noexcept {
    p11[k] = v.a11;
    p12[k] = v.a12;
    p22[k] = v.a22;
  }

  double max_abs() const;

  SymMatrixField& operator+=(const SymMatrixField& other);
  SymMatrixField& operator-=(const SymMatrixField& other);
  SymMatrixField& operator*=(double s);

  ScalarField p11;
  ScalarField p12;
  ScalarField p22;
};

SymMatrixField operator+(SymMatrixField a, const SymMatrixField& b);
SymMatrixField operator-(SymMatrixField a, const SymMatrixField& b);
SymMatrixField operator*(double s, SymMatrixField a);

/// Nodewise determinant, det(I + P) when shift_identity is set.
ScalarField det_field(const SymMatrixField& p, bool shift_identity = false);

/// Uniform ellipticity of I + P over grid nodes.
struct EllipticityReport {
  double nu1 = 1.0;    // min over nodes of the smallest eigenvalue of I + P
  double nu2 = 1.0;    // max over nodes of the largest eigenvalue
  double kappa = 1.0;  // nu2 / nu1, +inf when not elliptic
  bool elliptic = true;
};

EllipticityReport ellipticity_report(const SymMatrixField& p);

}  // namespace masplit
