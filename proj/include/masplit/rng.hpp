#pragma once

#include <cstdint>
#include <random>

#include "masplit/matfield.hpp"

namespace masplit {

/// Seeded generator with portable uniform draws (std distributions are
/// implementation-defined, mt19937_64 output is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// White-noise symmetric matrix field with entries uniform in [-1, 1].
SymMatrixField random_matrix_field(int n, Rng& rng);
/// Smooth symmetric matrix field: random Fourier modes with |k_i| <= kmax,
/// scaled so the largest nodal entry equals amplitude.
SymMatrixField smooth_random_matrix_field(int n, Rng& rng, int kmax, double amplitude);
ScalarField random_scalar_field(int n, Rng& rng);

}  // namespace masplit
