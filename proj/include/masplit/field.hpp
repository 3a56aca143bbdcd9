#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace masplit {

/// Real values on an n x n uniform periodic grid over [0,1)^2.
/// Storage is row-major: node (i, j) sits at x = (i/n, j/n).
class ScalarField {
 public:
  ScalarField() = default;
  /// Zero field. n must be even and >= 8.
  explicit ScalarField(int n);
  ScalarField(int n, std::vector<double> values);

  template <class Fn>
  static ScalarField sample(int n, Fn&& fn) {
    ScalarField out(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        out(i, j) = fn(static_cast<double>(i) / n, static_cast<double>(j) / n);
      }
    }
    return out;
  }

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return values_.size(); }
  double spacing() const noexcept { return 1.0 / n_; }

  double& operator()(int i, int j) { return values_[static_cast<std::size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const {
    return values_[static_cast<std::size_t>(i) * n_ + j];
  }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double mean() const;
  double max_abs() const;
  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);

 private:
  int n_ = 0;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Throws InvalidArgument unless n is even and >= 8.
void require_grid_size(int n);
/// Throws InvalidArgument if the two sizes differ.
void require_same_grid(int n_a, int n_b, const char* where);

}  // namespace masplit
