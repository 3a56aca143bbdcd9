#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = masplit::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("masplit_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

std::vector<std::vector<std::string>> csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Cli, Fnv1aKnownValues) {
  EXPECT_EQ(masplit::cli::fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(masplit::cli::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Cli, SolveConvergesAndWritesOutputs) {
  const fs::path dir = scratch("solve");
  const CliRun r = cli({"solve", "--eps", "0.002", "--n", "64", "--out-dir", dir.string(),
                     "--dump-fields"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json s = load(dir / "summary.json");
  EXPECT_EQ(s["status"], "converged");
  EXPECT_LT(s["rho_obs"].get<double>(), 1.0);
  EXPECT_TRUE(s["elliptic"].get<bool>());
  for (const char* key : {"config", "rho_bound", "kappa", "iterations", "plateau_error",
                          "variant", "ties_broken"}) {
    EXPECT_TRUE(s.contains(key)) << key;
  }
  EXPECT_EQ(csv(dir / "trace.csv").front().size(), 7u);
  const std::string trace = slurp(dir / "trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), masplit::cli::kTraceHeader);
  const json m = load(dir / "manifest.json");
  EXPECT_EQ(m["config_hash"], s["config_hash"]);
  for (const auto& f : m["files"]) {
    EXPECT_TRUE(fs::exists(f.get<std::string>()));
    EXPECT_GT(fs::file_size(f.get<std::string>()), 0u);
  }
  EXPECT_TRUE(fs::exists(dir / "solution.mafld"));
}

TEST(Cli, SolveIsDeterministicAndHashStable) {
  const fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  const std::vector<std::string> args{"solve", "--eps", "0.002", "--n", "32", "--init",
                                      "perturbed", "--amp", "0.01", "--seed", "9"};
  auto with_dir = [&](const fs::path& d) {
    auto v = args;
    v.push_back("--out-dir");
    v.push_back(d.string());
    return v;
  };
  ASSERT_EQ(cli(with_dir(a)).code, 0);
  ASSERT_EQ(cli(with_dir(b)).code, 0);
  EXPECT_EQ(slurp(a / "trace.csv"), slurp(b / "trace.csv"));
  EXPECT_EQ(load(a / "manifest.json")["config_hash"], load(b / "manifest.json")["config_hash"]);
  auto other = with_dir(c);
  other[10] = "10";
  ASSERT_EQ(cli(other).code, 0);
  EXPECT_NE(load(a / "manifest.json")["config_hash"], load(c / "manifest.json")["config_hash"]);
}

TEST(Cli, NonEllipticNeedsFlagAndReportsIt) {
  const fs::path dir = scratch("nonell");
  const CliRun refused = cli({"solve", "--eps", "0.03", "--n", "64", "--out-dir", dir.string()});
  EXPECT_EQ(refused.code, 1);
  EXPECT_NE(refused.err.find("--allow-nonelliptic"), std::string::npos);
  const CliRun r = cli({"solve", "--eps", "0.03", "--n", "64", "--allow-nonelliptic", "--out-dir",
                     dir.string()});
  EXPECT_EQ(r.code, 2);
  const json s = load(dir / "summary.json");
  EXPECT_FALSE(s["elliptic"].get<bool>());
  EXPECT_TRUE(fs::exists(dir / "trace.csv"));
}

TEST(Cli, UsageErrors) {
  const CliRun missing = cli({"solve", "--n", "64"});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("missing f source"), std::string::npos);
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  EXPECT_EQ(cli({"solve", "--eps", "0.002", "--variant", "h3"}).code, 1);
  EXPECT_EQ(cli({"solve", "--eps", "0.002", "--n", "33"}).code, 1);
  EXPECT_EQ(cli({"solve", "--eps", "0.002", "--init", "file"}).code, 1);
  EXPECT_EQ(cli({"solve", "--eps", "0.002", "--config", "/nonexistent/cfg"}).code, 1);
  EXPECT_EQ(cli({"solve", "--help"}).code, 0);
}

TEST(Cli, NonConvergenceExitsTwoWithTrace) {
  const fs::path dir = scratch("maxit");
  const CliRun r = cli({"solve", "--eps", "0.002", "--n", "32", "--max-iters", "3", "--out-dir",
                     dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(csv(dir / "trace.csv").size(), 5u);
  EXPECT_EQ(load(dir / "summary.json")["status"], "max_iterations");
}

TEST(Cli, ConfigFileWithFlagOverrides) {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "# experiment\neps = 0.002\nn=32\nmax_iters=4\n--variant=hm\n";
  }
  const CliRun r = cli({"solve", "--config", (dir / "run.cfg").string(), "--max-iters", "6",
                     "--out-dir", (dir / "out").string()});
  EXPECT_EQ(r.code, 2) << r.err;
  const json s = load(dir / "out" / "summary.json");
  EXPECT_EQ(s["config"]["n"], 32);
  EXPECT_EQ(s["config"]["max_iters"], 6);
  EXPECT_EQ(s["config"]["variant"], "hm");
  EXPECT_EQ(s["variant"]["b_step"], "pointwise Frobenius (L2) projection");
}

TEST(Cli, EnvironmentSuppliesDefaultOutDir) {
  const fs::path dir = scratch("env");
  setenv("MASPLIT_OUT_DIR", dir.string().c_str(), 1);
  const CliRun r = cli({"solve", "--eps", "0.002", "--n", "16"});
  unsetenv("MASPLIT_OUT_DIR");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
}

TEST(Cli, SolveFromProblemDump) {
  const fs::path dir = scratch("ffile");
  ASSERT_EQ(cli({"dump-field", "--eps", "0.002", "--n", "32", "--out", (dir / "p.mafld").string()})
                .code,
            0);
  const json d = load(dir / "p.json");
  EXPECT_EQ(d["n"], 32);
  EXPECT_NEAR(d["kappa"].get<double>(), 1.17145, 1e-5);
  for (const char* key : {"epsilon", "nu1", "nu2"}) EXPECT_TRUE(d.contains(key));
  const CliRun r = cli({"solve", "--f-file", (dir / "p.mafld").string(), "--out-dir",
                     (dir / "out").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const json s = load(dir / "out" / "summary.json");
  EXPECT_EQ(s["kappa_source"], "exact");
  EXPECT_EQ(cli({"solve", "--f-file", (dir / "p.mafld").string(), "--n", "64"}).code, 1);
  ASSERT_EQ(cli({"dump-field", "--eps", "0.002", "--n", "32", "--field", "f", "--out",
                 (dir / "f.mafld").string()})
                .code,
            0);
  const CliRun fonly = cli({"solve", "--f-file", (dir / "f.mafld").string(), "--out-dir",
                         (dir / "out2").string()});
  EXPECT_EQ(fonly.code, 0) << fonly.err;
  EXPECT_EQ(load(dir / "out2" / "summary.json")["kappa_source"], "final_iterate");
}

TEST(Cli, SweepRatesIncreaseWithAmplitude) {
  const fs::path dir = scratch("sweep_eps");
  const CliRun r = cli({"sweep", "--eps", "0.002,0.02", "--n", "64", "--max-iters", "1000",
                     "--jobs", "2", "--out-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv(dir / "sweep.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(slurp(dir / "sweep.csv").substr(0, 46), "eps,n,rho_obs,rho_bound,kappa,iters_to_plateau");
  EXPECT_LT(std::stod(rows[1][2]), std::stod(rows[2][2]));
  EXPECT_TRUE(fs::exists(dir / "eps_0.002_n_64" / "trace.csv"));
  EXPECT_TRUE(fs::exists(dir / "eps_0.02_n_64" / "trace.csv"));
}

TEST(Cli, SweepPlateauNonIncreasingInN) {
  const fs::path dir = scratch("sweep_n");
  ASSERT_EQ(cli({"sweep", "--eps", "0.002", "--n", "32,64", "--out-dir", dir.string()}).code, 0);
  const auto rows = csv(dir / "errors_vs_n.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_LE(std::stod(rows[2][2]), std::stod(rows[1][2]));
  EXPECT_LE(std::stod(rows[2][4]), std::stod(rows[1][4]));
}

TEST(Cli, SweepJobsDoNotChangeResultsAndFailuresAreRecorded) {
  const fs::path a = scratch("sweep_j1"), b = scratch("sweep_j3");
  const std::vector<std::string> base{"sweep", "--eps", "0.002,0.01,0.03", "--n", "16,32"};
  auto v1 = base, v3 = base;
  v1.insert(v1.end(), {"--out-dir", a.string()});
  v3.insert(v3.end(), {"--out-dir", b.string(), "--jobs", "3"});
  EXPECT_EQ(cli(v1).code, 2);  // eps = 0.03 cells are skipped
  EXPECT_EQ(cli(v3).code, 2);
  EXPECT_EQ(slurp(a / "sweep.csv"), slurp(b / "sweep.csv"));
  EXPECT_EQ(slurp(a / "eps_0.01_n_32" / "trace.csv"), slurp(b / "eps_0.01_n_32" / "trace.csv"));
  const auto failures = csv(a / "failures.csv");
  EXPECT_EQ(failures.size(), 3u);
  EXPECT_EQ(cli({"sweep", "--n", "32"}).code, 1);
  EXPECT_EQ(cli({"sweep", "--eps", ""}).code, 1);
  EXPECT_EQ(cli({"sweep", "--eps", "0.002,abc"}).code, 1);
}

TEST(Cli, RhoReports) {
  const CliRun r0 = cli({"rho", "--eps", "0", "--n", "32"});
  ASSERT_EQ(r0.code, 0) << r0.err;
  const json j0 = json::parse(r0.out);
  EXPECT_NEAR(j0["rho0"].get<double>(), 0.70711, 1e-3);
  for (const char* key : {"residual", "iterations", "kappa", "rate_bound", "margin"}) {
    EXPECT_TRUE(j0.contains(key)) << key;
  }
  const fs::path dir = scratch("rho");
  const CliRun r2 = cli({"rho", "--eps", "0.02", "--n", "64", "--out-dir", dir.string()});
  ASSERT_EQ(r2.code, 0);
  EXPECT_GE(json::parse(r2.out)["margin"].get<double>(), -1e-3);
  EXPECT_TRUE(fs::exists(dir / "rho.json"));

  ASSERT_EQ(cli({"dump-field", "--eps", "0.03", "--n", "16", "--field", "hessian", "--out",
                 (dir / "h.mafld").string()})
                .code,
            0);
  EXPECT_EQ(cli({"rho", "--field", (dir / "h.mafld").string()}).code, 2);
  EXPECT_EQ(cli({"rho"}).code, 1);
}

TEST(Cli, ValidateSuites) {
  const CliRun r = cli({"validate", "--suite", "spectral", "--suite", "interpolation"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("spectral"), std::string::npos);
  EXPECT_EQ(r.out.find("det-projection"), std::string::npos);
  EXPECT_EQ(cli({"validate", "--suite", "det-projection", "--cases", "50"}).code, 0);
  EXPECT_EQ(cli({"validate", "--suite", "bogus"}).code, 1);
}

TEST(Cli, DiffField) {
  const fs::path dir = scratch("diff");
  ASSERT_EQ(cli({"dump-field", "--eps", "0.002", "--n", "16", "--out", (dir / "a.mafld").string()}).code, 0);
  ASSERT_EQ(cli({"dump-field", "--eps", "0.002", "--n", "16", "--out", (dir / "b.mafld").string()}).code, 0);
  ASSERT_EQ(cli({"dump-field", "--eps", "0.01", "--n", "16", "--out", (dir / "c.mafld").string()}).code, 0);
  ASSERT_EQ(cli({"dump-field", "--eps", "0.01", "--n", "32", "--out", (dir / "d.mafld").string()}).code, 0);
  EXPECT_EQ(cli({"diff-field", (dir / "a.mafld").string(), (dir / "b.mafld").string()}).code, 0);
  const CliRun differ = cli({"diff-field", (dir / "a.mafld").string(), (dir / "c.mafld").string()});
  EXPECT_EQ(differ.code, 2);
  EXPECT_GT(json::parse(differ.out)["max_abs_diff"].get<double>(), 0.0);
  EXPECT_EQ(cli({"diff-field", (dir / "a.mafld").string(), (dir / "c.mafld").string(), "--tol",
                 "10"}).code,
            0);
  EXPECT_EQ(cli({"diff-field", (dir / "a.mafld").string(), (dir / "d.mafld").string()}).code, 2);
  EXPECT_EQ(cli({"diff-field", (dir / "a.mafld").string(), (dir / "zz.mafld").string()}).code, 1);
}
