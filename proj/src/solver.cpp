#include "masplit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "masplit/errors.hpp"
#include "masplit/field_io.hpp"
#include "masplit/rng.hpp"

namespace masplit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Values used for rate fitting and plateau detection: err_l2 when known.
std::vector<double> decay_series(const ConvergenceTrace& trace) {
  std::vector<double> v;
  v.reserve(trace.rows.size());
  const bool have_exact = !trace.rows.empty() && std::isfinite(trace.rows.back().err_l2);
  for (const auto& r : trace.rows) v.push_back(have_exact ? r.err_l2 : r.increment_l2);
  return v;
}

double max_det_residual(const SymMatrixField& p, const ScalarField& f) {
  double worst = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double det = (1.0 + p.p11[k]) * (1.0 + p.p22[k]) - p.p12[k] * p.p12[k];
    worst = std::max(worst, std::abs(det - f[k]));
  }
  return worst;
}

}  // namespace

void SolverConfig::validate() const {
  require_grid_size(n);
  if (!(tol_increment > 0.0)) throw InvalidArgument("tol_increment must be > 0");
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (variant == Variant::Hm && m < 2) throw InvalidArgument("the Hm variant needs m >= 2");
  if (init.kind == InitKind::FromFile && init.path.empty()) {
    throw InvalidArgument("file initial guess requires a path");
  }
  if (init.kind == InitKind::ExactPerturbed && !(init.amplitude >= 0.0)) {
    throw InvalidArgument("perturbation amplitude must be >= 0");
  }
}

std::string to_string(Variant v) { return v == Variant::L2 ? "l2" : "hm"; }

std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::Zero: return "zero";
    case InitKind::ExactPerturbed: return "perturbed";
    case InitKind::FromFile: return "file";
  }
  return "unknown";
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Failed: return "failed";
  }
  return "unknown";
}

Problem Problem::from_manufactured(const ManufacturedProblem& mp) {
  return {mp.f, mp.u_exact, mp.hessian_exact};
}

TStep apply_T(const SymMatrixField& p, const ScalarField& f, const SolverConfig& config,
              ProjectionOptions projection) {
  require_same_grid(p.n(), f.n(), "apply_T");
  VProjection v = project_onto_V(p, SobolevIndex(config.projection_index()),
                                 VProjectionOptions{config.dealias});
  FieldProjection b = project_field(v.hessian, f, projection);
  return {std::move(b.q), std::move(v.hessian), std::move(v.potential), b.report};
}

RateFit fit_rate(const ConvergenceTrace& trace) {
  const std::vector<double> v = decay_series(trace);
  if (v.size() < 2) throw InsufficientData("trace has fewer than two rows");
  const double final_value = v.back();
  const double threshold = 10.0 * final_value;

  std::size_t last = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (std::isfinite(v[k]) && v[k] > 0.0 && v[k] >= threshold) last = k;
  }
  std::vector<double> xs, ys;
  for (std::size_t k = 1; k <= last; ++k) {
    if (!(std::isfinite(v[k]) && v[k] > 0.0)) continue;
    xs.push_back(trace.rows[k].iter);
    ys.push_back(std::log(v[k]));
  }
  if (xs.size() < 5) {
    throw InsufficientData("only " + std::to_string(xs.size()) +
                           " pre-plateau rows; at least 5 are needed");
  }
  const double count = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  RateFit fit;
  const double slope = sxy / sxx;
  fit.rho = std::exp(slope);
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.first_iter = static_cast<int>(xs.front());
  fit.last_iter = static_cast<int>(xs.back());
  fit.geometric = fit.r_squared >= 0.99 && fit.rho <= 1.0;
  return fit;
}

int iterations_to_plateau(const ConvergenceTrace& trace) {
  const std::vector<double> v = decay_series(trace);
  if (v.empty()) return 0;
  const double threshold = 10.0 * v.back();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (std::isfinite(v[k]) && v[k] <= threshold) return trace.rows[k].iter;
  }
  return trace.rows.back().iter;
}

double plateau_mean(const ConvergenceTrace& trace, double TraceRow::*column) {
  if (trace.rows.empty()) return kNaN;
  const int start = iterations_to_plateau(trace);
  double sum = 0.0;
  int count = 0;
  for (const auto& r : trace.rows) {
    if (r.iter < start || !std::isfinite(r.*column)) continue;
    sum += r.*column;
    ++count;
  }
  return count > 0 ? sum / count : kNaN;
}

SymMatrixField initial_guess(const SolverConfig& config, const Problem& problem) {
  const int n = problem.f.n();
  switch (config.init.kind) {
    case InitKind::Zero:
      return SymMatrixField(n);
    case InitKind::ExactPerturbed: {
      if (!problem.hessian_exact) {
        throw InvalidArgument("perturbed initial guess needs an exact solution");
      }
      Rng rng(config.init.seed);
      return *problem.hessian_exact +
             smooth_random_matrix_field(n, rng, 4, config.init.amplitude);
    }
    case InitKind::FromFile: {
      SymMatrixField p = read_matrix_field(config.init.path);
      require_same_grid(p.n(), n, "initial guess file");
      return p;
    }
  }
  throw InvalidArgument("unknown initial guess policy");
}

SolveResult solve(const SolverConfig& config, const Problem& problem) {
  config.validate();
  require_same_grid(config.n, problem.f.n(), "solve");
  if (problem.u_exact) require_same_grid(config.n, problem.u_exact->n(), "solve");
  if (problem.hessian_exact) require_same_grid(config.n, problem.hessian_exact->n(), "solve");

  const SobolevIndex variant_index(config.projection_index());
  const VProjectionOptions vopts{config.dealias};
  const ProjectionOptions bopts{TiePolicy::Break, 100};

  SolveResult result;
  SymMatrixField p = initial_guess(config, problem);
  SymMatrixField previous;

  for (int it = 0;; ++it) {
    VProjection v = project_onto_V(p, variant_index, vopts);

    TraceRow row;
    row.iter = it;
    if (problem.hessian_exact) {
      const auto norms = sobolev_norms(p - *problem.hessian_exact, {0.0, 1.5, 2.0});
      row.err_l2 = norms[0];
      row.err_h32 = norms[1];
      row.err_h2 = norms[2];
    } else {
      row.err_l2 = row.err_h32 = row.err_h2 = kNaN;
    }
    row.err_u_l2 = problem.u_exact
                       ? sobolev_norm(v.potential - *problem.u_exact, SobolevIndex(0.0))
                       : kNaN;
    row.det_residual_max = max_det_residual(p, problem.f);

    bool converged = false;
    if (it == 0) {
      row.increment_l2 = kNaN;
    } else {
      const SymMatrixField delta = p - previous;
      row.increment_l2 = sobolev_norm(delta, SobolevIndex(0.0));
      result.final_increment = row.increment_l2;
      converged = result.final_increment < config.tol_increment;
    }
    result.trace.rows.push_back(row);
    result.hessian = v.hessian;
    result.potential = v.potential;

    if (converged) {
      result.status = SolveStatus::Converged;
      break;
    }
    if (it == config.max_iters) {
      result.status = SolveStatus::MaxIterations;
      result.message = "increment did not fall below tolerance in " +
                       std::to_string(config.max_iters) + " iterations";
      break;
    }
    try {
      FieldProjection b = project_field(v.hessian, problem.f, bopts);
      result.ties_broken += b.report.ties_broken;
      previous = std::move(p);
      p = std::move(b.q);
      result.iterations = it + 1;
    } catch (const Error& err) {
      result.status = SolveStatus::Failed;
      result.message = err.what();
      break;
    }
  }
  result.p = std::move(p);
  try {
    result.trace.fit = fit_rate(result.trace);
  } catch (const InsufficientData&) {
    result.trace.fit.reset();
  }
  return result;
}

}  // namespace masplit
