#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "masplit/det_projection.hpp"
#include "masplit/matfield.hpp"
#include "masplit/problems.hpp"
#include "masplit/spectral.hpp"

namespace masplit {

enum class Variant { L2, Hm };

enum class InitKind { Zero, ExactPerturbed, FromFile };

struct InitialGuess {
  InitKind kind = InitKind::Zero;
  double amplitude = 1e-3;
  std::uint64_t seed = 0;
  std::string path;
};

struct SolverConfig {
  int n = 64;
  Variant variant = Variant::L2;
  int m = 2;  // Sobolev index of the Hm variant, >= 2
  double tol_increment = 1e-12;
  int max_iters = 200;
  InitialGuess init;
  bool dealias = false;

  /// Throws InvalidArgument on an inconsistent configuration.
  void validate() const;
  /// Index of the inner product used by the variational step.
  int projection_index() const noexcept { return variant == Variant::Hm ? m : 0; }
};

std::string to_string(Variant v);
std::string to_string(InitKind k);

/// Right-hand side plus optional exact solution for the error columns.
struct Problem {
  ScalarField f;
  std::optional<ScalarField> u_exact;
  std::optional<SymMatrixField> hessian_exact;

  static Problem from_manufactured(const ManufacturedProblem& mp);
};

struct TStep {
  SymMatrixField next;       // Pi_B(Pi_V(P))
  SymMatrixField hessian;    // Pi_V(P)
  ScalarField potential;     // u^n
  FieldProjectionReport report;
};

/// One application of T = Pi_B o Pi_V. The B-step is always the pointwise
/// Frobenius projection, for both variants.
TStep apply_T(const SymMatrixField& p, const ScalarField& f, const SolverConfig& config,
              ProjectionOptions projection = {TiePolicy::Break, 100});

/// One row per iterate P^n. Error columns are NaN without an exact solution;
/// the increment of row 0 is NaN.
struct TraceRow {
  int iter = 0;
  double err_l2 = 0.0;
  double err_h32 = 0.0;
  double err_h2 = 0.0;
  double increment_l2 = 0.0;
  double err_u_l2 = 0.0;
  double det_residual_max = 0.0;
};

struct RateFit {
  double rho = 0.0;
  double r_squared = 0.0;
  int first_iter = 0;
  int last_iter = 0;
  bool geometric = false;  // r_squared >= 0.99
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;
  std::optional<RateFit> fit;
};

/// Least-squares slope of log(err) vs n over the pre-plateau window: rows
/// from iteration 1 up to the last one with err >= 10x the final value.
/// Uses err_l2, or increment_l2 when no exact solution was available.
/// Throws InsufficientData with fewer than 5 usable rows.
RateFit fit_rate(const ConvergenceTrace& trace);

/// First iteration whose err_l2 (or increment) is within 10x of the final value.
int iterations_to_plateau(const ConvergenceTrace& trace);

/// Mean of a trace column over the rows from iterations_to_plateau onward.
double plateau_mean(const ConvergenceTrace& trace, double TraceRow::*column);

enum class SolveStatus { Converged, MaxIterations, Failed };
std::string to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::MaxIterations;
  std::string message;
  ConvergenceTrace trace;
  SymMatrixField p;          // last iterate
  SymMatrixField hessian;    // Pi_V of the last iterate
  ScalarField potential;
  int iterations = 0;        // number of T applications
  int ties_broken = 0;       // medial-axis nodes resolved over the run
  double final_increment = 0.0;  // L^2 norm, for both variants
};

/// Initial iterate P^0 for the configured policy.
SymMatrixField initial_guess(const SolverConfig& config, const Problem& problem);

/// Runs the splitting iteration until the L^2 increment drops below
/// tol_increment or max_iters is reached. Stronger norms amplify rounding
/// noise in high modes past the default tolerance, so the Hm variant stops
/// on the same quantity.
/// Projection failures end the run with status Failed and the trace so far.
SolveResult solve(const SolverConfig& config, const Problem& problem);

}  // namespace masplit
