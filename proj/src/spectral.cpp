#include "masplit/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "masplit/errors.hpp"

namespace masplit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct FftwBuffer {
  explicit FftwBuffer(std::size_t count)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count))) {
    if (data == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  fftw_complex* data;
};

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  PlanPair get(int n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    const auto count = static_cast<std::size_t>(n) * n;
    FftwBuffer in(count);
    FftwBuffer out(count);
    PlanPair p;
    p.forward = fftw_plan_dft_2d(n, n, in.data, out.data, FFTW_FORWARD, FFTW_ESTIMATE);
    p.backward = fftw_plan_dft_2d(n, n, in.data, out.data, FFTW_BACKWARD, FFTW_ESTIMATE);
    plans_.emplace(n, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

 private:
  std::mutex mutex_;
  std::map<int, PlanPair> plans_;
};

/// Symbol of the Hessian at one mode: multipliers for (11, 12, 22).
struct HessianSymbol {
  double s11, s12, s22;
};

HessianSymbol hessian_symbol(int k1, int k2, int n) {
  const double w1 = kTwoPi * k1;
  const double w2 = kTwoPi * k2;
  const bool nyquist = k1 == -n / 2 || k2 == -n / 2;
  return {-w1 * w1, nyquist ? 0.0 : -w1 * w2, -w2 * w2};
}

double sobolev_weight(int k1, int k2, double s, NormKind kind) {
  const double w2 = kTwoPi * kTwoPi * (static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
  if (kind == NormKind::Seminorm) {
    if (s == 0.0) return 1.0;
    return w2 == 0.0 ? 0.0 : std::pow(w2, s);
  }
  return s == 0.0 ? 1.0 : std::pow(1.0 + w2, s);
}


// Weighted sum over modes of Re(a conj(b)).
double weighted_product(const SpectrumField& a, const SpectrumField& b, double s, NormKind kind) {
  const int n = a.n();
  double acc = 0.0;
  for (int s1 = 0; s1 < n; ++s1) {
    const int k1 = a.wave(s1);
    for (int s2 = 0; s2 < n; ++s2) {
      const int k2 = a.wave(s2);
      const std::size_t idx = static_cast<std::size_t>(s1) * n + s2;
      const auto& ca = a.coeffs()[idx];
      const auto& cb = b.coeffs()[idx];
      acc += sobolev_weight(k1, k2, s, kind) * (ca.real() * cb.real() + ca.imag() * cb.imag());
    }
  }
  return acc;
}

}  // namespace

SobolevIndex::SobolevIndex(double s) : s_(s) {
  if (!std::isfinite(s) || s < 0.0) {
    throw InvalidArgument("Sobolev index must be finite and >= 0, got " + std::to_string(s));
  }
}

SpectrumField::SpectrumField(int n) : n_(n) {
  require_grid_size(n);
  coeffs_.assign(static_cast<std::size_t>(n) * n, {0.0, 0.0});
}

SpectrumField dft(const ScalarField& field) {
  const int n = field.n();
  require_grid_size(n);
  const auto count = static_cast<std::size_t>(n) * n;
  const PlanPair plans = PlanCache::instance().get(n);
  FftwBuffer in(count);
  FftwBuffer out(count);
  for (std::size_t k = 0; k < count; ++k) {
    in.data[k][0] = field[k];
    in.data[k][1] = 0.0;
  }
  fftw_execute_dft(plans.forward, in.data, out.data);
  SpectrumField spec(n);
  const double scale = 1.0 / static_cast<double>(count);
  for (std::size_t k = 0; k < count; ++k) {
    spec.coeffs()[k] = {out.data[k][0] * scale, out.data[k][1] * scale};
  }
  return spec;
}

ScalarField idft(const SpectrumField& spec) {
  const int n = spec.n();
  require_grid_size(n);
  const auto count = static_cast<std::size_t>(n) * n;
  const PlanPair plans = PlanCache::instance().get(n);
  FftwBuffer in(count);
  FftwBuffer out(count);
  for (std::size_t k = 0; k < count; ++k) {
    in.data[k][0] = spec.coeffs()[k].real();
    in.data[k][1] = spec.coeffs()[k].imag();
  }
  fftw_execute_dft(plans.backward, in.data, out.data);
  ScalarField field(n);
  for (std::size_t k = 0; k < count; ++k) field[k] = out.data[k][0];
  return field;
}

SymMatrixField hessian_of(const ScalarField& potential) {
  const int n = potential.n();
  const SpectrumField u = dft(potential);
  SpectrumField h11(n), h12(n), h22(n);
  for (int s1 = 0; s1 < n; ++s1) {
    for (int s2 = 0; s2 < n; ++s2) {
      const auto sym = hessian_symbol(u.wave(s1), u.wave(s2), n);
      const std::size_t idx = static_cast<std::size_t>(s1) * n + s2;
      const auto c = u.coeffs()[idx];
      h11.coeffs()[idx] = sym.s11 * c;
      h12.coeffs()[idx] = sym.s12 * c;
      h22.coeffs()[idx] = sym.s22 * c;
    }
  }
  return {idft(h11), idft(h12), idft(h22)};
}

double sobolev_norm(const ScalarField& field, SobolevIndex s, NormKind kind) {
  const SpectrumField c = dft(field);
  return std::sqrt(weighted_product(c, c, s.value(), kind));
}

double sobolev_norm(const SymMatrixField& field, SobolevIndex s, NormKind kind) {
  const SpectrumField c11 = dft(field.p11);
  const SpectrumField c12 = dft(field.p12);
  const SpectrumField c22 = dft(field.p22);
  const double sq = weighted_product(c11, c11, s.value(), kind) +
                    2.0 * weighted_product(c12, c12, s.value(), kind) +
                    weighted_product(c22, c22, s.value(), kind);
  return std::sqrt(sq);
}

double inner_product(const ScalarField& a, const ScalarField& b, SobolevIndex s) {
  require_same_grid(a.n(), b.n(), "inner_product");
  return weighted_product(dft(a), dft(b), s.value(), NormKind::Full);
}

double inner_product(const SymMatrixField& a, const SymMatrixField& b, SobolevIndex s) {
  require_same_grid(a.n(), b.n(), "inner_product");
  const double v = s.value();
  return weighted_product(dft(a.p11), dft(b.p11), v, NormKind::Full) +
         2.0 * weighted_product(dft(a.p12), dft(b.p12), v, NormKind::Full) +
         weighted_product(dft(a.p22), dft(b.p22), v, NormKind::Full);
}

VProjection project_onto_V(const SymMatrixField& p, SobolevIndex /*m*/,
                           VProjectionOptions options) {
  const int n = p.n();
  const SpectrumField c11 = dft(p.p11);
  const SpectrumField c12 = dft(p.p12);
  const SpectrumField c22 = dft(p.p22);
  SpectrumField v(n), h11(n), h12(n), h22(n);
  const int band = n / 3;
  for (int s1 = 0; s1 < n; ++s1) {
    const int k1 = v.wave(s1);
    for (int s2 = 0; s2 < n; ++s2) {
      const int k2 = v.wave(s2);
      if (k1 == 0 && k2 == 0) continue;
      if (options.dealias && (std::abs(k1) > band || std::abs(k2) > band)) continue;
      const auto sym = hessian_symbol(k1, k2, n);
      const std::size_t idx = static_cast<std::size_t>(s1) * n + s2;
      const double norm_sq = sym.s11 * sym.s11 + 2.0 * sym.s12 * sym.s12 + sym.s22 * sym.s22;
      const std::complex<double> coeff =
          (sym.s11 * c11.coeffs()[idx] + 2.0 * sym.s12 * c12.coeffs()[idx] +
           sym.s22 * c22.coeffs()[idx]) /
          norm_sq;
      v.coeffs()[idx] = coeff;
      h11.coeffs()[idx] = sym.s11 * coeff;
      h12.coeffs()[idx] = sym.s12 * coeff;
      h22.coeffs()[idx] = sym.s22 * coeff;
    }
  }
  return {SymMatrixField(idft(h11), idft(h12), idft(h22)), idft(v)};
}

}  // namespace masplit

namespace masplit {

std::vector<double> sobolev_norms(const SymMatrixField& field, const std::vector<double>& orders) {
  const SpectrumField c11 = dft(field.p11);
  const SpectrumField c12 = dft(field.p12);
  const SpectrumField c22 = dft(field.p22);
  std::vector<double> out;
  out.reserve(orders.size());
  for (double s : orders) {
    const double v = SobolevIndex(s).value();
    out.push_back(std::sqrt(weighted_product(c11, c11, v, NormKind::Full) +
                            2.0 * weighted_product(c12, c12, v, NormKind::Full) +
                            weighted_product(c22, c22, v, NormKind::Full)));
  }
  return out;
}

}  // namespace masplit
