#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "masplit/errors.hpp"
#include "masplit/field_io.hpp"
#include "masplit/problems.hpp"
#include "masplit/spectral_analysis.hpp"
#include "masplit/validation.hpp"

namespace masplit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Raised for bad flag combinations discovered after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

std::string join_command(const std::vector<std::string>& args) {
  std::string s = "masplit";
  for (const auto& a : args) s += " " + a;
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

fs::path resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MASPLIT_OUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return "masplit_out";
}

// Records output files and writes the run manifest.
class Manifest {
 public:
  Manifest(const std::vector<std::string>& args, std::map<std::string, std::string> config)
      : command_(join_command(args)), config_(std::move(config)), started_(utc_now()) {}

  void add(const fs::path& p) {
    std::lock_guard lock(mutex_);
    files_.push_back(p.string());
  }

  std::string hash() const {
    std::string canonical;
    for (const auto& [k, v] : config_) canonical += k + "=" + v + "\n";
    return hex64(fnv1a(canonical));
  }

  void write(const fs::path& dir, const json& summary) const {
    json j;
    j["command"] = command_;
    j["config"] = config_;
    j["config_hash"] = hash();
    j["started"] = started_;
    j["finished"] = utc_now();
    j["files"] = files_;
    j["summary"] = summary;
    write_json(dir / "manifest.json", j);
  }

 private:
  std::string command_;
  std::map<std::string, std::string> config_;
  std::string started_;
  std::vector<std::string> files_;
  mutable std::mutex mutex_;
};

// ---- solver options shared by solve and sweep ----

struct SolverFlags {
  std::string variant = "l2";
  int m = 2;
  double tol = 1e-12;
  int max_iters = 200;
  std::string init = "zero";
  std::string init_file;
  double amp = 1e-3;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool dealias = false;
  bool allow_nonelliptic = false;
  bool dump_fields = false;
};

void add_solver_flags(CLI::App* app, SolverFlags& f) {
  app->add_option("--variant", f.variant, "l2 or hm (pointwise B-step in both)")
      ->check(CLI::IsMember({"l2", "hm"}))
      ->capture_default_str();
  app->add_option("--m", f.m, "Sobolev index of the hm variant")->capture_default_str();
  app->add_option("--tol", f.tol, "increment tolerance")->capture_default_str();
  app->add_option("--max-iters", f.max_iters, "iteration cap")->capture_default_str();
  app->add_option("--init", f.init, "initial guess policy")
      ->check(CLI::IsMember({"zero", "perturbed", "file"}))
      ->capture_default_str();
  app->add_option("--init-file", f.init_file, "matrix dump used by --init file");
  app->add_option("--amp", f.amp, "perturbation amplitude for --init perturbed")
      ->capture_default_str();
  app->add_option("--seed", f.seed, "random seed")->capture_default_str();
  app->add_option("--out-dir", f.out_dir, "output directory (default $MASPLIT_OUT_DIR)");
  app->add_flag("--dealias", f.dealias, "2/3-rule truncation of the potential");
  app->add_flag("--allow-nonelliptic", f.allow_nonelliptic,
                "run amplitudes beyond the ellipticity threshold");
  app->add_flag("--dump-fields", f.dump_fields, "write final iterate and potential dumps");
}

SolverConfig make_config(const SolverFlags& f, int n) {
  SolverConfig c;
  c.n = n;
  c.variant = f.variant == "hm" ? Variant::Hm : Variant::L2;
  c.m = f.m;
  c.tol_increment = f.tol;
  c.max_iters = f.max_iters;
  c.dealias = f.dealias;
  c.init.seed = f.seed;
  c.init.amplitude = f.amp;
  if (f.init == "perturbed") c.init.kind = InitKind::ExactPerturbed;
  if (f.init == "file") {
    c.init.kind = InitKind::FromFile;
    c.init.path = f.init_file;
    if (f.init_file.empty()) throw UsageError("--init file requires --init-file");
  }
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return c;
}

std::map<std::string, std::string> config_map(const SolverConfig& c) {
  return {{"n", std::to_string(c.n)},
          {"variant", to_string(c.variant)},
          {"m", std::to_string(c.m)},
          {"tol", format_double(c.tol_increment)},
          {"max_iters", std::to_string(c.max_iters)},
          {"init", to_string(c.init.kind)},
          {"init_file", c.init.path},
          {"amp", format_double(c.init.amplitude)},
          {"seed", std::to_string(c.init.seed)},
          {"dealias", c.dealias ? "true" : "false"}};
}

json config_json(const SolverConfig& c) {
  json j;
  j["n"] = c.n;
  j["variant"] = to_string(c.variant);
  j["m"] = c.m;
  j["tol"] = c.tol_increment;
  j["max_iters"] = c.max_iters;
  j["init"] = to_string(c.init.kind);
  if (c.init.kind == InitKind::FromFile) j["init_file"] = c.init.path;
  j["amp"] = c.init.amplitude;
  j["seed"] = c.init.seed;
  j["dealias"] = c.dealias;
  return j;
}

json variant_json(const SolverConfig& c) {
  json j;
  j["name"] = to_string(c.variant);
  j["v_step"] = c.variant == Variant::Hm ? "H^" + std::to_string(c.m) + " projection"
                                         : "L2 projection";
  j["b_step"] = "pointwise Frobenius (L2) projection";
  return j;
}

struct SolveOutcome {
  json summary;
  SolveResult result;
  double rho_obs = kNaN;
  double rho_bound = kNaN;
  double kappa = kNaN;
};

SolveOutcome run_solver(const SolverConfig& config, const Problem& problem,
                        const std::optional<EllipticityReport>& exact_report,
                        const std::vector<std::string>& warnings) {
  SolveOutcome o;
  o.result = solve(config, problem);
  const SolveResult& r = o.result;

  std::optional<EllipticityReport> report = exact_report;
  std::string kappa_source = "exact";
  if (!report && r.hessian.size() > 0) {
    report = ellipticity_report(r.hessian);
    kappa_source = "final_iterate";
  }
  const bool elliptic = report && report->elliptic;
  if (elliptic) {
    o.kappa = report->kappa;
    o.rho_bound = rate_bound(report->kappa);
  }
  if (r.trace.fit) o.rho_obs = r.trace.fit->rho;

  json& s = o.summary;
  s["config"] = config_json(config);
  s["variant"] = variant_json(config);
  s["status"] = to_string(r.status);
  if (!r.message.empty()) s["message"] = r.message;
  s["iterations"] = r.iterations;
  s["final_increment"] = number_or_null(r.final_increment);
  s["rho_obs"] = number_or_null(o.rho_obs);
  s["rho_fit_r_squared"] = r.trace.fit ? number_or_null(r.trace.fit->r_squared) : json(nullptr);
  s["rho_fit_geometric"] = r.trace.fit ? json(r.trace.fit->geometric) : json(nullptr);
  s["rho_bound"] = number_or_null(o.rho_bound);
  s["kappa"] = number_or_null(o.kappa);
  s["kappa_source"] = kappa_source;
  if (report) {
    s["nu1"] = number_or_null(report->nu1);
    s["nu2"] = number_or_null(report->nu2);
  }
  s["elliptic"] = elliptic;
  s["iters_to_plateau"] = iterations_to_plateau(r.trace);
  const TraceRow& last = r.trace.rows.back();
  s["plateau_error"] = number_or_null(
      std::isfinite(last.err_l2) ? plateau_mean(r.trace, &TraceRow::err_l2) : kNaN);
  s["plateau_error_u"] = number_or_null(plateau_mean(r.trace, &TraceRow::err_u_l2));
  s["final_err_l2"] = number_or_null(last.err_l2);
  s["final_err_h32"] = number_or_null(last.err_h32);
  s["final_err_u_l2"] = number_or_null(last.err_u_l2);
  s["det_residual_max"] = number_or_null(last.det_residual_max);
  s["ties_broken"] = r.ties_broken;
  s["warnings"] = warnings;
  return o;
}

// Loads a problem dump: 1 component (f) or 5 (f, u, h11, h12, h22).
Problem load_problem(const fs::path& path) {
  std::vector<ScalarField> c = read_fields(path);
  Problem p;
  if (c.size() == 1) {
    p.f = std::move(c[0]);
  } else if (c.size() == 5) {
    p.f = std::move(c[0]);
    p.u_exact = std::move(c[1]);
    p.hessian_exact = SymMatrixField(std::move(c[2]), std::move(c[3]), std::move(c[4]));
  } else {
    throw UsageError(path.string() + ": expected 1 or 5 components, found " +
                     std::to_string(c.size()));
  }
  return p;
}

std::vector<ScalarField> problem_components(const ManufacturedProblem& mp) {
  return {mp.f, mp.u_exact, mp.hessian_exact.p11, mp.hessian_exact.p12, mp.hessian_exact.p22};
}

// ---- solve ----

struct SolveFlags {
  SolverFlags solver;
  std::optional<double> eps;
  std::optional<int> n;
  std::string f_file;
};

int cmd_solve(const SolveFlags& flags, const std::vector<std::string>& args, std::ostream& out,
              std::ostream& err) {
  if (flags.eps && !flags.f_file.empty()) throw UsageError("pass either --eps or --f-file");
  if (!flags.eps && flags.f_file.empty()) {
    throw UsageError("missing f source: pass --eps <amplitude> or --f-file <dump>");
  }

  Problem problem;
  std::optional<EllipticityReport> exact_report;
  std::vector<std::string> warnings;
  std::map<std::string, std::string> source;
  if (flags.eps) {
    const int n = flags.n.value_or(64);
    ManufacturedProblem mp;
    try {
      mp = make_manufactured(*flags.eps, n);
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    if (!mp.report.elliptic && !flags.solver.allow_nonelliptic) {
      throw UsageError("eps = " + short_double(*flags.eps) +
                       " is not elliptic; pass --allow-nonelliptic to run it anyway");
    }
    problem = Problem::from_manufactured(mp);
    exact_report = mp.report;
    warnings = mp.warnings;
    source["eps"] = format_double(*flags.eps);
  } else {
    problem = load_problem(flags.f_file);
    if (flags.n && *flags.n != problem.f.n()) {
      throw UsageError("--n disagrees with the grid of " + flags.f_file);
    }
    if (problem.hessian_exact) exact_report = ellipticity_report(*problem.hessian_exact);
    source["f_file"] = flags.f_file;
  }
  const SolverConfig config = make_config(flags.solver, problem.f.n());
  if (config.init.kind == InitKind::ExactPerturbed && !problem.hessian_exact) {
    throw UsageError("--init perturbed needs an exact solution");
  }

  auto cfg = config_map(config);
  cfg.insert(source.begin(), source.end());
  Manifest manifest(args, cfg);

  SolveOutcome o = run_solver(config, problem, exact_report, warnings);
  if (flags.eps) o.summary["epsilon"] = *flags.eps;
  else o.summary["f_file"] = flags.f_file;
  o.summary["config_hash"] = manifest.hash();

  const fs::path dir = resolve_out_dir(flags.solver.out_dir);
  fs::create_directories(dir);
  write_trace_csv(dir / "trace.csv", o.result.trace);
  manifest.add(dir / "trace.csv");
  if (flags.solver.dump_fields) {
    write_field(dir / "solution.mafld", o.result.p);
    write_field(dir / "potential.mafld", o.result.potential);
    manifest.add(dir / "solution.mafld");
    manifest.add(dir / "potential.mafld");
  }
  write_json(dir / "summary.json", o.summary);
  manifest.add(dir / "summary.json");
  manifest.write(dir, o.summary);

  out << "status " << to_string(o.result.status) << ", " << o.result.iterations
      << " iterations, rho_obs " << short_double(o.rho_obs) << ", rho_bound "
      << short_double(o.rho_bound) << "\n";
  out << "wrote " << (dir / "summary.json").string() << "\n";
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  if (o.result.status != SolveStatus::Converged) {
    err << "masplit solve: " << o.result.message << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---- sweep ----

struct SweepFlags {
  SolverFlags solver;
  std::vector<double> eps;
  std::vector<int> n{64};
  int jobs = 1;
};

struct CellResult {
  double eps = 0.0;
  int n = 0;
  std::string status;
  std::string message;
  double rho_obs = kNaN;
  double rho_bound = kNaN;
  double kappa = kNaN;
  int iters_to_plateau = -1;
  double plateau_l2 = kNaN;
  double plateau_h32 = kNaN;
  double plateau_u = kNaN;
};

CellResult run_cell(double eps, int n, const SolverFlags& flags, const fs::path& dir,
                    Manifest& manifest) {
  CellResult cell;
  cell.eps = eps;
  cell.n = n;
  try {
    const ManufacturedProblem mp = make_manufactured(eps, n);
    if (!mp.report.elliptic && !flags.allow_nonelliptic) {
      cell.status = "skipped";
      cell.message = "not elliptic";
      return cell;
    }
    const SolverConfig config = make_config(flags, n);
    SolveOutcome o = run_solver(config, Problem::from_manufactured(mp), mp.report, mp.warnings);
    o.summary["epsilon"] = eps;
    const fs::path cell_dir = dir / ("eps_" + short_double(eps) + "_n_" + std::to_string(n));
    fs::create_directories(cell_dir);
    write_trace_csv(cell_dir / "trace.csv", o.result.trace);
    write_json(cell_dir / "summary.json", o.summary);
    manifest.add(cell_dir / "trace.csv");
    manifest.add(cell_dir / "summary.json");

    cell.status = to_string(o.result.status);
    cell.message = o.result.message;
    cell.rho_obs = o.rho_obs;
    cell.rho_bound = o.rho_bound;
    cell.kappa = o.kappa;
    cell.iters_to_plateau = iterations_to_plateau(o.result.trace);
    cell.plateau_l2 = plateau_mean(o.result.trace, &TraceRow::err_l2);
    cell.plateau_h32 = plateau_mean(o.result.trace, &TraceRow::err_h32);
    cell.plateau_u = plateau_mean(o.result.trace, &TraceRow::err_u_l2);
  } catch (const std::exception& e) {
    cell.status = "error";
    cell.message = e.what();
  }
  return cell;
}

int cmd_sweep(const SweepFlags& flags, const std::vector<std::string>& args, std::ostream& out,
              std::ostream& err) {
  if (flags.eps.empty()) throw UsageError("empty epsilon list");
  if (flags.n.empty()) throw UsageError("empty grid-size list");
  if (flags.jobs < 1) throw UsageError("--jobs must be >= 1");
  for (int n : flags.n) {
    try {
      require_grid_size(n);
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  std::map<std::string, std::string> cfg = config_map(make_config(flags.solver, flags.n.front()));
  cfg.erase("n");
  std::string eps_list, n_list;
  for (double e : flags.eps) eps_list += (eps_list.empty() ? "" : ",") + format_double(e);
  for (int n : flags.n) n_list += (n_list.empty() ? "" : ",") + std::to_string(n);
  cfg["eps"] = eps_list;
  cfg["n"] = n_list;
  Manifest manifest(args, cfg);

  const fs::path dir = resolve_out_dir(flags.solver.out_dir);
  fs::create_directories(dir);

  std::vector<std::pair<double, int>> cells;
  for (double e : flags.eps)
    for (int n : flags.n) cells.emplace_back(e, n);
  std::vector<CellResult> results(cells.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      results[k] = run_cell(cells[k].first, cells[k].second, flags.solver, dir, manifest);
    }
  };
  const int threads = std::min<int>(flags.jobs, static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream sweep, errors, failures;
  sweep << kSweepHeader << "\n";
  errors << "eps,n,plateau_err_l2,plateau_err_h32,plateau_err_u_l2\n";
  failures << "eps,n,status,message\n";
  bool all_ok = true;
  json cell_json = json::array();
  for (const auto& c : results) {
    sweep << format_double(c.eps) << "," << c.n << "," << format_double(c.rho_obs) << ","
          << format_double(c.rho_bound) << "," << format_double(c.kappa) << ","
          << c.iters_to_plateau << "\n";
    errors << format_double(c.eps) << "," << c.n << "," << format_double(c.plateau_l2) << ","
           << format_double(c.plateau_h32) << "," << format_double(c.plateau_u) << "\n";
    if (c.status != "converged") {
      all_ok = false;
      std::string msg = c.message;
      for (char& ch : msg)
        if (ch == ',' || ch == '\n') ch = ';';
      failures << format_double(c.eps) << "," << c.n << "," << c.status << "," << msg << "\n";
      err << "cell eps=" << short_double(c.eps) << " n=" << c.n << ": " << c.status
          << (c.message.empty() ? "" : " (" + c.message + ")") << "\n";
    }
    cell_json.push_back({{"eps", c.eps},
                         {"n", c.n},
                         {"status", c.status},
                         {"rho_obs", number_or_null(c.rho_obs)},
                         {"rho_bound", number_or_null(c.rho_bound)},
                         {"kappa", number_or_null(c.kappa)},
                         {"iters_to_plateau", c.iters_to_plateau}});
  }
  write_text(dir / "sweep.csv", sweep.str());
  write_text(dir / "errors_vs_n.csv", errors.str());
  manifest.add(dir / "sweep.csv");
  manifest.add(dir / "errors_vs_n.csv");
  if (!all_ok) {
    write_text(dir / "failures.csv", failures.str());
    manifest.add(dir / "failures.csv");
  }
  manifest.write(dir, json{{"cells", cell_json}});

  out << sweep.str();
  return all_ok ? kExitOk : kExitFailure;
}

// ---- rho ----

struct RhoFlags {
  std::optional<double> eps;
  int n = 64;
  std::string field;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  int max_iters = 10000;
  std::string out_dir;
};

int cmd_rho(const RhoFlags& flags, const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  if (flags.eps && !flags.field.empty()) throw UsageError("pass either --eps or --field");
  if (!flags.eps && flags.field.empty()) throw UsageError("missing field: pass --eps or --field");

  SymMatrixField p;
  json j;
  if (flags.eps) {
    try {
      p = make_manufactured(*flags.eps, flags.n).hessian_exact;
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    j["epsilon"] = *flags.eps;
    j["n"] = flags.n;
  } else {
    std::vector<ScalarField> c = read_fields(flags.field);
    if (c.size() == 3) {
      p = SymMatrixField(std::move(c[0]), std::move(c[1]), std::move(c[2]));
    } else if (c.size() == 5) {
      p = SymMatrixField(std::move(c[2]), std::move(c[3]), std::move(c[4]));
    } else {
      throw UsageError(flags.field + ": expected a 3- or 5-component dump");
    }
    j["field"] = flags.field;
    j["n"] = p.n();
  }

  const EllipticityReport report = ellipticity_report(p);
  if (!report.elliptic) {
    err << "masplit rho: I + P is not positive definite at every node\n";
    return kExitFailure;
  }
  OperatorNormEstimate est;
  try {
    est = estimate_rho0(p, flags.seed, {flags.tol, flags.max_iters});
  } catch (const Error& e) {
    err << "masplit rho: " << e.what() << "\n";
    return kExitFailure;
  }
  const double bound = rate_bound(report.kappa);
  j["rho0"] = est.rho0;
  j["residual"] = est.residual;
  j["iterations"] = est.iterations;
  j["slow_convergence"] = est.slow_convergence;
  j["kappa"] = report.kappa;
  j["nu1"] = report.nu1;
  j["nu2"] = report.nu2;
  j["rate_bound"] = bound;
  j["margin"] = bound - est.rho0;
  j["seed"] = flags.seed;

  out << j.dump(2) << "\n";
  if (!flags.out_dir.empty()) {
    const fs::path dir = flags.out_dir;
    fs::create_directories(dir);
    std::map<std::string, std::string> cfg{{"n", std::to_string(p.n())},
                                           {"seed", std::to_string(flags.seed)},
                                           {"tol", format_double(flags.tol)},
                                           {"max_iters", std::to_string(flags.max_iters)}};
    if (flags.eps) cfg["eps"] = format_double(*flags.eps);
    else cfg["field"] = flags.field;
    Manifest manifest(args, cfg);
    write_json(dir / "rho.json", j);
    manifest.add(dir / "rho.json");
    manifest.write(dir, j);
  }
  return kExitOk;
}

// ---- validate ----

struct ValidateFlags {
  std::vector<std::string> suites;
  std::uint64_t seed = 20240501;
  int cases = 0;
};

int cmd_validate(const ValidateFlags& flags, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> known = validation::suite_names();
  std::vector<std::string> selected = flags.suites.empty() ? known : flags.suites;
  for (const auto& s : selected) {
    if (std::find(known.begin(), known.end(), s) == known.end()) {
      std::string list;
      for (const auto& k : known) list += " " + k;
      throw UsageError("unknown suite '" + s + "'; available:" + list);
    }
  }
  bool all = true;
  out << std::left << std::setw(16) << "suite" << std::setw(48) << "check" << std::setw(14)
      << "value" << std::setw(14) << "threshold"
      << "result\n";
  for (const auto& name : selected) {
    const validation::SuiteResult r = validation::run_suite(name, {flags.seed, flags.cases});
    for (const auto& c : r.checks) {
      out << std::left << std::setw(16) << name << std::setw(48) << c.name << std::setw(14)
          << short_double(c.value) << std::setw(14) << short_double(c.threshold)
          << (c.passed ? "pass" : "FAIL") << "\n";
    }
    out << std::left << std::setw(16) << name << "suite " << (r.passed() ? "PASS" : "FAIL")
        << "\n";
    all = all && r.passed();
  }
  if (!all) err << "masplit validate: at least one check failed\n";
  return all ? kExitOk : kExitFailure;
}

// ---- dump-field / diff-field ----

struct DumpFlags {
  double eps = 0.002;
  int n = 64;
  std::string what = "problem";
  std::string out;
  std::string out_dir;
};

int cmd_dump(const DumpFlags& flags, std::ostream& out) {
  ManufacturedProblem mp;
  try {
    mp = make_manufactured(flags.eps, flags.n);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  std::vector<ScalarField> comps;
  std::vector<std::string> names;
  if (flags.what == "problem") {
    comps = problem_components(mp);
    names = {"f", "u", "h11", "h12", "h22"};
  } else if (flags.what == "f") {
    comps = {mp.f};
    names = {"f"};
  } else if (flags.what == "u") {
    comps = {mp.u_exact};
    names = {"u"};
  } else {
    comps = {mp.hessian_exact.p11, mp.hessian_exact.p12, mp.hessian_exact.p22};
    names = {"h11", "h12", "h22"};
  }
  fs::path path = flags.out.empty() ? resolve_out_dir(flags.out_dir) / (flags.what + ".mafld")
                                    : fs::path(flags.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_fields(path, comps);

  json d;
  d["epsilon"] = flags.eps;
  d["n"] = flags.n;
  d["kappa"] = number_or_null(mp.report.kappa);
  d["nu1"] = mp.report.nu1;
  d["nu2"] = mp.report.nu2;
  d["elliptic"] = mp.report.elliptic;
  d["components"] = names;
  d["file"] = path.filename().string();
  d["warnings"] = mp.warnings;
  fs::path descriptor = path;
  descriptor.replace_extension(".json");
  write_json(descriptor, d);
  out << "wrote " << path.string() << " and " << descriptor.string() << "\n";
  return kExitOk;
}

struct DiffFlags {
  std::string a;
  std::string b;
  double tol = 0.0;
};

int cmd_diff(const DiffFlags& flags, std::ostream& out, std::ostream& err) {
  const std::vector<ScalarField> a = read_fields(flags.a);
  const std::vector<ScalarField> b = read_fields(flags.b);
  json j;
  if (a.size() != b.size() || a.front().n() != b.front().n()) {
    j["comparable"] = false;
    j["components"] = {a.size(), b.size()};
    j["n"] = {a.front().n(), b.front().n()};
    out << j.dump(2) << "\n";
    err << "masplit diff-field: dumps differ in shape\n";
    return kExitFailure;
  }
  double worst = 0.0;
  json per = json::array();
  for (std::size_t c = 0; c < a.size(); ++c) {
    double max_diff = 0.0, sum_sq = 0.0;
    for (std::size_t k = 0; k < a[c].size(); ++k) {
      const double d = std::abs(a[c][k] - b[c][k]);
      max_diff = std::max(max_diff, d);
      sum_sq += d * d;
    }
    worst = std::max(worst, max_diff);
    per.push_back({{"component", c},
                   {"max_abs_diff", max_diff},
                   {"rms_diff", std::sqrt(sum_sq / static_cast<double>(a[c].size()))}});
  }
  j["comparable"] = true;
  j["n"] = a.front().n();
  j["components"] = per;
  j["max_abs_diff"] = worst;
  j["tolerance"] = flags.tol;
  j["within_tolerance"] = worst <= flags.tol;
  out << j.dump(2) << "\n";
  return worst <= flags.tol ? kExitOk : kExitFailure;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool flag_present(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Expands "--config <file>" into --key=value arguments for keys not already on
// the command line. The subcommand is expected at args[0].
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) {
      path = args[++k];
    } else if (args[k].rfind("--config=", 0) == 0) {
      path = args[k].substr(9);
    } else {
      rest.push_back(args[k]);
    }
  }
  if (path.empty() || rest.empty()) return args;

  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::vector<std::string> injected;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty()) throw UsageError(path + ":" + std::to_string(line_no) + ": empty key");
    const std::string flag = "--" + key;
    if (!flag_present(rest, flag)) injected.push_back(flag + "=" + value);
  }
  std::vector<std::string> out{rest.front()};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_trace_csv(const fs::path& path, const ConvergenceTrace& trace) {
  std::ostringstream s;
  s << kTraceHeader << "\n";
  for (const auto& r : trace.rows) {
    s << r.iter << "," << format_double(r.err_l2) << "," << format_double(r.err_h32) << ","
      << format_double(r.err_h2) << "," << format_double(r.increment_l2) << ","
      << format_double(r.err_u_l2) << "," << format_double(r.det_residual_max) << "\n";
  }
  write_text(path, s.str());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Least-squares splitting solver for the periodic Monge-Ampere equation",
               "masplit"};
  app.require_subcommand(1);
  const std::string config_help = "flat key=value file; command-line flags win";
  std::string config_path;  // consumed by expand_config

  SolveFlags solve_flags;
  double solve_eps = 0.0;
  int solve_n = 64;
  CLI::App* solve = app.add_subcommand("solve", "run the splitting iteration");
  solve->add_option("--config", config_path, config_help);
  auto* solve_eps_opt = solve->add_option("--eps", solve_eps, "manufactured amplitude");
  auto* solve_n_opt = solve->add_option("--n", solve_n, "grid size (default 64)");
  solve->add_option("--f-file", solve_flags.f_file, "right-hand side dump (1 or 5 components)");
  add_solver_flags(solve, solve_flags.solver);

  SweepFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "run a grid of (eps, n) cells");
  sweep->add_option("--config", config_path, config_help);
  std::vector<std::string> sweep_eps;
  sweep->add_option("--eps", sweep_eps, "amplitudes (comma separated)")->delimiter(',');
  sweep->add_option("--n", sweep_flags.n, "grid sizes (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--jobs", sweep_flags.jobs, "parallel cells")->capture_default_str();
  add_solver_flags(sweep, sweep_flags.solver);

  RhoFlags rho_flags;
  double rho_eps = 0.0;
  CLI::App* rho = app.add_subcommand("rho", "estimate the linearized contraction factor");
  rho->add_option("--config", config_path, config_help);
  auto* rho_eps_opt = rho->add_option("--eps", rho_eps, "manufactured amplitude");
  rho->add_option("--n", rho_flags.n, "grid size")->capture_default_str();
  rho->add_option("--field", rho_flags.field, "matrix dump (3 components) or problem dump");
  rho->add_option("--seed", rho_flags.seed, "power-iteration seed")->capture_default_str();
  rho->add_option("--tol", rho_flags.tol, "Rayleigh-quotient tolerance")->capture_default_str();
  rho->add_option("--max-iters", rho_flags.max_iters, "power-iteration cap")
      ->capture_default_str();
  rho->add_option("--out-dir", rho_flags.out_dir, "also write rho.json and a manifest here");

  ValidateFlags validate_flags;
  CLI::App* validate = app.add_subcommand("validate", "run the oracle suites");
  validate->add_option("--config", config_path, config_help);
  validate->add_option("--suite", validate_flags.suites, "suite name (repeatable)");
  validate->add_option("--seed", validate_flags.seed, "sampling seed")->capture_default_str();
  validate->add_option("--cases", validate_flags.cases, "samples per suite (0 = default)");

  DumpFlags dump_flags;
  CLI::App* dump = app.add_subcommand("dump-field", "write a manufactured problem dump");
  dump->add_option("--config", config_path, config_help);
  dump->add_option("--eps", dump_flags.eps, "amplitude")->capture_default_str();
  dump->add_option("--n", dump_flags.n, "grid size")->capture_default_str();
  dump->add_option("--field", dump_flags.what, "problem, f, u or hessian")
      ->check(CLI::IsMember({"problem", "f", "u", "hessian"}))
      ->capture_default_str();
  dump->add_option("--out", dump_flags.out, "dump path (default <out-dir>/<field>.mafld)");
  dump->add_option("--out-dir", dump_flags.out_dir, "output directory");

  DiffFlags diff_flags;
  CLI::App* diff = app.add_subcommand("diff-field", "compare two dumps");
  diff->add_option("a", diff_flags.a, "first dump")->required();
  diff->add_option("b", diff_flags.b, "second dump")->required();
  diff->add_option("--tol", diff_flags.tol, "max abs difference accepted")
      ->capture_default_str();

  std::vector<std::string> expanded;
  try {
    expanded = expand_config(args);
  } catch (const UsageError& e) {
    err << "masplit: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "masplit: " << e.what() << "\n";
    err << "run 'masplit --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (*solve) {
      if (solve_eps_opt->count() > 0) solve_flags.eps = solve_eps;
      if (solve_n_opt->count() > 0) solve_flags.n = solve_n;
      return cmd_solve(solve_flags, args, out, err);
    }
    if (*sweep) {
      for (const auto& token : sweep_eps) {
        const std::string t = trim(token);
        if (t.empty()) continue;
        try {
          std::size_t used = 0;
          sweep_flags.eps.push_back(std::stod(t, &used));
          if (used != t.size()) throw std::invalid_argument(t);
        } catch (const std::logic_error&) {
          throw UsageError("--eps: not a number: '" + t + "'");
        }
      }
      return cmd_sweep(sweep_flags, args, out, err);
    }
    if (*rho) {
      if (rho_eps_opt->count() > 0) rho_flags.eps = rho_eps;
      return cmd_rho(rho_flags, args, out, err);
    }
    if (*validate) return cmd_validate(validate_flags, out, err);
    if (*dump) return cmd_dump(dump_flags, out);
    if (*diff) return cmd_diff(diff_flags, out, err);
  } catch (const UsageError& e) {
    err << "masplit: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "masplit: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "masplit: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace masplit::cli
