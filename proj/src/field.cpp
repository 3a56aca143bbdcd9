#include "masplit/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "masplit/errors.hpp"

namespace masplit {

void require_grid_size(int n) {
  if (n < 8 || n % 2 != 0) {
    throw InvalidArgument("grid size must be even and >= 8, got " + std::to_string(n));
  }
}

void require_same_grid(int n_a, int n_b, const char* where) {
  if (n_a != n_b) {
    throw InvalidArgument(std::string(where) + ": grid sizes differ (" + std::to_string(n_a) +
                          " vs " + std::to_string(n_b) + ")");
  }
}

ScalarField::ScalarField(int n) : n_(n) {
  require_grid_size(n);
  values_.assign(static_cast<std::size_t>(n) * n, 0.0);
}

ScalarField::ScalarField(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  require_grid_size(n);
  if (values_.size() != static_cast<std::size_t>(n) * n) {
    throw InvalidArgument("ScalarField: expected " + std::to_string(n * n) + " values, got " +
                          std::to_string(values_.size()));
  }
}

double ScalarField::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return values_.empty() ? 0.0 : s / static_cast<double>(values_.size());
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(n_, other.n_, "ScalarField +=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(n_, other.n_, "ScalarField -=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

}  // namespace masplit
