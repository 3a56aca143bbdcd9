#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "masplit/solver.hpp"

namespace masplit::cli {

/// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

/// Parses and dispatches one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

/// Trace CSV with a fixed header; values printed round-trip exact.
void write_trace_csv(const std::filesystem::path& path, const ConvergenceTrace& trace);

inline constexpr const char* kTraceHeader =
    "iter,err_l2,err_h32,err_h2,increment_l2,err_u_l2,det_residual_max";
inline constexpr const char* kSweepHeader = "eps,n,rho_obs,rho_bound,kappa,iters_to_plateau";

}  // namespace masplit::cli
