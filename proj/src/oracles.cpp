#include "masplit/oracles.hpp"

#include <cmath>
#include <limits>

#include "masplit/det_projection.hpp"

namespace masplit::oracles {

HyperbolaMinimum hyperbola_search(double m1, double m2, double f, int samples, double t_min,
                                  double t_max) {
  auto dist_sq = [&](double t) {
    const double dx = t - m1;
    const double dy = f / t - m2;
    return dx * dx + dy * dy;
  };
  const double log_lo = std::log(t_min);
  const double step = (std::log(t_max) - log_lo) / (samples - 1);
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const double val = dist_sq(std::exp(log_lo + step * k));
    if (val < best_val) {
      best_val = val;
      best = k;
    }
  }
  // Golden-section on the bracketing interval, in log t.
  double a = log_lo + step * std::max(best - 1, 0);
  double b = log_lo + step * std::min(best + 1, samples - 1);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = dist_sq(std::exp(c));
  double fd = dist_sq(std::exp(d));
  for (int it = 0; it < 200 && (b - a) > 1e-16; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = dist_sq(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = dist_sq(std::exp(d));
    }
  }
  const double t = std::exp(0.5 * (a + b));
  return {t, f / t, std::sqrt(std::min(dist_sq(t), best_val))};
}

MatrixMinimum matrix_entry_search(const Sym2& target, double f, int grid) {
  const Sym2 goal = Sym2::identity() + target;
  auto make = [&](double log_p, double q) {
    const double p = std::exp(log_p);
    return Sym2{p, q, (f + q * q) / p};
  };
  auto dist = [&](double log_p, double q) { return norm(make(log_p, q) - goal); };

  const double scale = norm(goal) + std::sqrt(f) + 1.0;
  const double lp_lo = std::log(1e-3), lp_hi = std::log(1e3 * scale);
  double best_lp = 0.0, best_q = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < grid; ++a) {
    const double lp = lp_lo + (lp_hi - lp_lo) * a / (grid - 1);
    for (int b = 0; b < grid; ++b) {
      const double q = -scale + 2.0 * scale * b / (grid - 1);
      const double v = dist(lp, q);
      if (v < best) {
        best = v;
        best_lp = lp;
        best_q = q;
      }
    }
  }
  double h_lp = (lp_hi - lp_lo) / (grid - 1);
  double h_q = 2.0 * scale / (grid - 1);
  while (h_lp > 1e-15 || h_q > 1e-15 * scale) {
    bool moved = false;
    const double cand[8][2] = {{h_lp, 0},  {-h_lp, 0},   {0, h_q},      {0, -h_q},
                               {h_lp, h_q}, {-h_lp, -h_q}, {h_lp, -h_q}, {-h_lp, h_q}};
    for (const auto& c : cand) {
      const double v = dist(best_lp + c[0], best_q + c[1]);
      if (v < best) {
        best = v;
        best_lp += c[0];
        best_q += c[1];
        moved = true;
        break;
      }
    }
    if (!moved) {
      h_lp *= 0.5;
      h_q *= 0.5;
    }
  }
  return {make(best_lp, best_q), best};
}

Sym2 fd_projection_derivative(const Sym2& y, double f, const Sym2& h, double step) {
  const Sym2 plus = project_point(y + step * h, f);
  const Sym2 minus = project_point(y - step * h, f);
  return (0.5 / step) * (plus - minus);
}

}  // namespace masplit::oracles
