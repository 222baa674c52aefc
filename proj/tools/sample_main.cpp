#include <CLI11.hpp>
#include <tbb/global_control.h>

#include <cstdlib>
#include <iostream>
#include <memory>

#include "walkjump/harness/analyze.hpp"
#include "walkjump/harness/presets.hpp"
#include "walkjump/harness/runner.hpp"

using namespace walkjump;
using namespace walkjump::harness;

namespace {

std::unique_ptr<tbb::global_control> thread_limit() {
  const char* env = std::getenv("WALKJUMP_THREADS");
  if (!env || !*env) return nullptr;
  const long n = std::strtol(env, nullptr, 10);
  if (n < 1) throw ConfigError("WALKJUMP_THREADS must be a positive integer");
  return std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                               static_cast<std::size_t>(n));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Walk-jump sampling with accumulated Gaussian measurements"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment config or preset");
  std::string config_path, preset, output;
  bool omit_timing = false, quiet = false;
  run->add_option("config", config_path, "Experiment config (JSON)");
  run->add_option("--preset", preset, "Built-in preset name");
  run->add_option("-o,--output", output, "Output directory (overrides the config)");
  run->add_flag("--omit-timing", omit_timing, "Write wall_ms = 0 for byte-identical reruns");
  run->add_flag("-q,--quiet", quiet, "No per-row progress");

  auto* an = app.add_subcommand("analyze", "Closed-form diagnostics as JSON");
  std::string quantity;
  AnalyzeArgs args;
  double sigma = 0.0, sigma2 = 0.0;
  an->add_option("quantity", quantity, "Quantity name")->required();
  an->add_option("--tau2", args.tau2, "Gaussian variances")->delimiter(',');
  an->add_option("--sigma", sigma, "Noise level");
  an->add_option("--sigma2", sigma2, "Noise variance");
  an->add_option("--t", args.t, "Measurement index");
  an->add_option("--t-max", args.t_max, "Last index for monotonicity checks");
  an->add_option("--m", args.m, "Number of measurements");
  an->add_option("--m-max", args.m_max, "Largest m for curves");
  an->add_option("--tau", args.tau, "Component standard deviation");
  an->add_option("--R", args.R, "Support radius");
  an->add_option("--mu", args.mu, "Mode location per coordinate");
  an->add_option("--alpha", args.alpha, "Weight of the +mu component");
  an->add_option("--L", args.L, "Lipschitz constant of grad f");
  an->add_option("--mu-growth", args.mu_growth, "Gradient growth constant");
  an->add_option("--Delta", args.Delta, "Gradient growth offset");
  an->add_option("--x0", args.x0, "Growth centre")->delimiter(',');
  an->add_option("--y", args.y, "Evaluation point")->delimiter(',');
  an->add_option("--d", args.d, "Dimension");
  an->add_option("--n-mc", args.n_mc, "Monte Carlo sample count");
  an->add_option("--seed", args.seed, "Random seed");
  an->add_option("--means", args.means, "Running means for the landscape")->delimiter(',');
  an->add_option("--ms", args.ms, "Values of m for the landscape")->delimiter(',');
  an->add_flag("--validate", args.validate, "Cross-check against a numerical oracle");

  auto* presets = app.add_subcommand("presets", "List or print built-in presets");
  presets->require_subcommand(1);
  presets->add_subcommand("list", "List preset names");
  auto* show = presets->add_subcommand("show", "Print a preset config");
  std::string show_name;
  show->add_option("name", show_name)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto limit = thread_limit();
    if (*run) {
      if (config_path.empty() == preset.empty())
        throw ConfigError("give exactly one of <config> or --preset");
      const ExperimentConfig cfg = preset.empty() ? load_config(config_path) : parse_config(preset_config(preset));
      RunOptions opts;
      opts.output_dir = output;
      opts.omit_timing = omit_timing;
      opts.log = quiet ? nullptr : &std::cerr;
      const RunSummary s = run_experiment(cfg, opts);
      std::cout << json{{"output", s.output_dir}, {"cells", s.cells}, {"rows", s.rows}}.dump() << '\n';
      return 0;
    }
    if (*an) {
      if (an->count("--sigma")) args.sigma = sigma;
      if (an->count("--sigma2")) args.sigma2 = sigma2;
      std::cout << analyze(quantity, args).dump(2) << '\n';
      return 0;
    }
    if (presets->got_subcommand("list")) {
      for (const auto& p : list_presets()) std::cout << p.name << "\t" << p.description << '\n';
      return 0;
    }
    std::cout << preset_config(show_name).dump(2) << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
