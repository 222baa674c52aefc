#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "walkjump/harness/analyze.hpp"
#include "walkjump/harness/config.hpp"
#include "walkjump/harness/presets.hpp"
#include "walkjump/harness/runner.hpp"

using namespace walkjump;
using namespace walkjump::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("walkjump_test_" + name);
  fs::remove_all(p);
  return p;
}

json small_config() {
  return json::parse(R"({
    "name": "small",
    "model": {"type": "mixture", "d": 2},
    "schemes": [{"label": "oat", "scheme": "oat"}, "direct"],
    "kernel": {"kind": "uld_sachs", "delta": 0.03, "gamma_delta": 0.05, "L": "auto"},
    "sampler": {"n_walkers": 5, "budget": 400, "trajectory_stride": 50, "checkpoints": [1]},
    "seeds": {"first": 3, "count": 2},
    "grid": {"sigma": [1.0], "m": [2]}
  })");
}

}  // namespace

TEST_CASE("strict parsing names the offending path") {
  json j = small_config();
  j["model"]["foo"] = 1;
  try {
    parse_config(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("/model/foo") != std::string::npos);
  }
  j = small_config();
  j["sampler"]["n_walkers"] = "many";
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = small_config();
  j["kernel"]["kind"] = "hmc";
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("cell expansion") {
  ExperimentConfig cfg = parse_config(small_config());
  const auto cells = expand_cells(cfg);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].sampler.scheme == Scheme::Oat);
  CHECK(cells[0].sampler.n_t == 200);  // budget / m
  CHECK(cells[0].sampler.kernel.L == doctest::Approx(1.0));
  CHECK(cells[1].sampler.scheme == Scheme::Direct);
  CHECK(cells[1].sigma == 0.0);
  CHECK(cells[1].sampler.n_t == 400);
  // mixture with tau = 1: Lipschitz constant of grad f is 1
  CHECK(cells[1].sampler.kernel.L == doctest::Approx(1.0));

  json j = small_config();
  j["grid"]["d"] = json::array({2, 4});
  j["grid"]["sigma"] = json::array({1.0, 2.0});
  const auto grid = expand_cells(parse_config(j));
  CHECK(grid.size() == 2 * 2 + 2);  // direct ignores sigma
}

TEST_CASE("empty grid gives a manifest and no rows") {
  json j = small_config();
  j["grid"]["sigma"] = json::array();
  ExperimentConfig cfg = parse_config(j);
  CHECK(expand_cells(cfg).empty());
  const fs::path out = scratch("empty");
  RunOptions opt;
  opt.output_dir = out.string();
  const auto summary = run_experiment(cfg, opt);
  CHECK(summary.rows == 0);
  CHECK(fs::exists(out / "manifest.json"));
  CHECK(slurp(out / "results.csv") == results_header() + "\n");
  fs::remove_all(out);
}

TEST_CASE("reruns without timing are byte identical") {
  ExperimentConfig cfg = parse_config(small_config());
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  RunOptions opt;
  opt.omit_timing = true;
  opt.output_dir = a.string();
  const auto summary = run_experiment(cfg, opt);
  opt.output_dir = b.string();
  run_experiment(cfg, opt);
  CHECK(summary.rows == 4);
  for (const char* f : {"manifest.json", "results.csv", "samples.csv", "trajectories.csv", "curves.csv"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const std::string results = slurp(a / "results.csv");
  CHECK(count_lines(results) == 1 + 4);
  CHECK(results.find(",ok\n") != std::string::npos);
  CHECK(count_lines(slurp(a / "samples.csv")) == 1 + 4 * 5);
  // stride 50 over 400 steps, 5 walkers, 4 runs
  CHECK(count_lines(slurp(a / "trajectories.csv")) == 1 + 4 * 5 * 8);
  const json manifest = json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["schema_version"] == kSchemaVersion);
  CHECK(manifest["cells"].size() == 2);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("run_cell is deterministic and fills the record") {
  ExperimentConfig cfg = parse_config(small_config());
  const auto cells = expand_cells(cfg);
  const CellRun r1 = run_cell(cfg, cells[0], 3, true);
  const CellRun r2 = run_cell(cfg, cells[0], 3, true);
  CHECK(r1.record.w2 == r2.record.w2);
  CHECK(r1.record.grad_evals == 5u * 400u);
  CHECK(r1.record.wall_ms == 0);
  CHECK(r1.record.status == "ok");
  CHECK(r1.reference.rows() == 5);
}

TEST_CASE("every preset parses and expands") {
  for (const auto& p : list_presets()) {
    CAPTURE(p.name);
    const ExperimentConfig cfg = parse_config(preset_config(p.name));
    CHECK_FALSE(expand_cells(cfg).empty());
  }
  CHECK_THROWS_AS(preset_config("nope"), ConfigError);
  CHECK(delta_search_grid().size() == 5);
  CHECK(gamma_delta_search_grid().size() == 8);
}

TEST_CASE("analyze reports") {
  AnalyzeArgs args;
  args.sigma = 1.0;
  args.t = 3;
  // conditional variance of y_t: sigma^2 + tau^2 sigma^2 / ((t - 1) tau^2 + sigma^2)
  auto cond_var = [](double tau2) { return 1.0 + tau2 / (2.0 * tau2 + 1.0); };
  CHECK(analyze("kappa-oat", args)["value"].get<double>() ==
        doctest::Approx(cond_var(1.0) / cond_var(0.1)).epsilon(1e-14));
  AnalyzeArgs z;
  z.sigma2 = 8.0;
  z.tau = 1.0;
  z.R = 3.0;
  z.m = 1;
  const json zr = analyze("zeta", z);
  CHECK(zr["value"].get<double>() == 0.0);
  CHECK(zr["boundary"].get<bool>());
  CHECK_THROWS_AS(analyze("no-such-quantity", args), ConfigError);
  for (const auto& q : analyze_quantities()) CHECK_FALSE(q.empty());
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678}) CHECK(std::stod(format_number(v)) == v);
}
