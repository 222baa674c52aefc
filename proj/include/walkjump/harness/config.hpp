#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "walkjump/samplers.hpp"

namespace walkjump::harness {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolkitVersion = "1.0.0";

struct ModelSpec {
  std::string type = "mixture";  // "gaussian" | "mixture"
  int d = 2;
  // gaussian: explicit variances, or tau2_narrow in slot 0 and tau2_wide elsewhere
  std::vector<double> tau2;
  double tau2_narrow = 0.1;
  double tau2_wide = 1.0;
  // mixture: alpha N(mu, tau^2 I) + (1 - alpha) N(-mu, tau^2 I), mu = mu_scale 1_d
  double alpha = 0.2;
  double mu_scale = 3.0;
  double tau = 1.0;
};

TargetModel build_model(const ModelSpec& spec, int d);

// Grid axes; an empty axis expands to zero cells.
struct GridSpec {
  std::vector<double> sigma;
  std::vector<int> d;
  std::vector<double> delta;
  std::vector<double> gamma_delta;
  std::vector<int> m;
  std::vector<int> n_mc;
};

// One compared scheme.  Axis overrides replace the global grid for this scheme.
struct SchemeSpec {
  std::string label;
  Scheme scheme = Scheme::Oat;
  std::optional<KernelKind> kernel;
  std::optional<ScoreMode> score;
  std::optional<double> L;
  std::optional<std::vector<double>> sigma, delta, gamma_delta;
  std::optional<std::vector<int>> d, m, n_mc;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string description;
  ModelSpec model;
  std::vector<SchemeSpec> schemes;
  KernelKind kernel = KernelKind::UldSachs;
  std::optional<double> L;  // unset: 1/sigma^2 when smoothing, Lipschitz constant of grad f otherwise
  ScoreMode score = ScoreMode::Analytic;
  int n_walkers = 100;
  std::optional<long> budget;  // score evaluations per walker
  std::optional<long> n_t;     // steps per measurement when no budget is given
  InitSpec init;
  long trajectory_stride = 0;
  std::vector<int> checkpoints;
  bool write_samples = true;
  std::optional<std::vector<double>> theta;
  std::vector<std::uint64_t> seeds{0};
  GridSpec grid;
  std::string output = "results";
  json resolved;  // normalized config echoed into the manifest
};

// Strict parse: unknown keys and wrong types raise ConfigError naming the
// offending JSON path.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);

// One fully determined run, independent of the seed.
struct Cell {
  int index = 0;
  std::string label;
  std::string key;  // stable identity used to derive per-cell streams
  SamplerConfig sampler;
  int d = 0;
  double sigma = 0.0;
  int m = 1;
  double delta = 0.0;
  double gamma_delta = 0.0;
  int n_mc = 0;
  long budget = 0;
};

std::vector<Cell> expand_cells(const ExperimentConfig& cfg);

std::uint64_t fnv1a(const std::string& s);

}  // namespace walkjump::harness
