#pragma once

#include <complex>
#include <vector>

#include "masplit/field.hpp"
#include "masplit/matfield.hpp"

namespace masplit {

/// Order s >= 0 of a Sobolev norm on the torus.
class SobolevIndex {
 public:
  /// Throws InvalidArgument for negative or non-finite s.
  explicit SobolevIndex(double s);
  double value() const noexcept { return s_; }

 private:
  double s_;
};

/// Fourier coefficients of a field on the n x n grid, unitary in L^2(T^2):
/// f(x) = sum_k c(k) exp(2 pi i k.x), c(0) is the mean.
/// Wave numbers k1, k2 range over {-n/2, ..., n/2 - 1}.
class SpectrumField {
 public:
  SpectrumField() = default;
  explicit SpectrumField(int n);

  int n() const noexcept { return n_; }

  /// Storage slot of a wave number in [-n/2, n/2).
  std::size_t slot(int k1, int k2) const noexcept {
    const int s1 = k1 < 0 ? k1 + n_ : k1;
    const int s2 = k2 < 0 ? k2 + n_ : k2;
    return static_cast<std::size_t>(s1) * n_ + s2;
  }
  /// Signed wave number of a storage index along one axis.
  int wave(int s) const noexcept { return s < n_ / 2 ? s : s - n_; }

  std::complex<double>& at(int k1, int k2) { return coeffs_[slot(k1, k2)]; }
  const std::complex<double>& at(int k1, int k2) const { return coeffs_[slot(k1, k2)]; }

  std::vector<std::complex<double>>& coeffs() noexcept { return coeffs_; }
  const std::vector<std::complex<double>>& coeffs() const noexcept { return coeffs_; }

 private:
  int n_ = 0;
  std::vector<std::complex<double>> coeffs_;
};

SpectrumField dft(const ScalarField& field);
/// Inverse transform; the imaginary residue of a non-Hermitian spectrum is dropped.
ScalarField idft(const SpectrumField& spec);

/// Spectral Hessian: component (a, b) has multiplier -(2 pi)^2 k_a k_b.
/// Mixed multipliers vanish on Nyquist rows and columns.
SymMatrixField hessian_of(const ScalarField& potential);

enum class NormKind { Full, Seminorm };

/// (sum_k (1 + |2 pi k|^2)^s |c(k)|^2)^(1/2); the seminorm uses |2 pi k|^(2s).
/// Matrix fields use the Frobenius product (off-diagonal counted twice).
double sobolev_norm(const ScalarField& field, SobolevIndex s, NormKind kind = NormKind::Full);
double sobolev_norm(const SymMatrixField& field, SobolevIndex s, NormKind kind = NormKind::Full);

/// H^s inner product built on the Frobenius product.
double inner_product(const SymMatrixField& a, const SymMatrixField& b, SobolevIndex s);
double inner_product(const ScalarField& a, const ScalarField& b, SobolevIndex s);

struct VProjection {
  SymMatrixField hessian;  // D^2 v
  ScalarField potential;   // v, zero mean
};

struct VProjectionOptions {
  /// Keep only potentials band-limited to |k_i| <= n/3 (2/3 rule).
  bool dealias = false;
};

/// Orthogonal projection onto Hessians of zero-mean periodic potentials.
/// The minimizer is the same for every H^m inner product (the H^m weight is a
/// positive scalar per mode), so m only enters through the caller's norms.
VProjection project_onto_V(const SymMatrixField& p, SobolevIndex m = SobolevIndex(0.0),
                           VProjectionOptions options = {});

}  // namespace masplit

namespace masplit {

/// Several Sobolev norms of one matrix field from a single set of transforms.
std::vector<double> sobolev_norms(const SymMatrixField& field, const std::vector<double>& orders);

}  // namespace masplit
