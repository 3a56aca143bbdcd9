#include "masplit/rng.hpp"

#include <cmath>
#include <numbers>

#include "masplit/spectral.hpp"

namespace masplit {

ScalarField random_scalar_field(int n, Rng& rng) {
  ScalarField out(n);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = rng.uniform(-1.0, 1.0);
  return out;
}

SymMatrixField random_matrix_field(int n, Rng& rng) {
  ScalarField a = random_scalar_field(n, rng);
  ScalarField b = random_scalar_field(n, rng);
  ScalarField c = random_scalar_field(n, rng);
  return {std::move(a), std::move(b), std::move(c)};
}

SymMatrixField smooth_random_matrix_field(int n, Rng& rng, int kmax, double amplitude) {
  auto component = [&] {
    ScalarField out(n);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
      for (int k2 = -kmax; k2 <= kmax; ++k2) {
        const double ca = rng.uniform(-1.0, 1.0);
        const double phase = rng.uniform(0.0, two_pi);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            out(i, j) += ca * std::cos(two_pi * (k1 * i + k2 * j) / n + phase);
          }
        }
      }
    }
    return out;
  };
  SymMatrixField out(component(), component(), component());
  const double peak = out.max_abs();
  if (peak > 0.0) out *= amplitude / peak;
  return out;
}

}  // namespace masplit
