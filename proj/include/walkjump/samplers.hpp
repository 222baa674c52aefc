#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "walkjump/kernels.hpp"
#include "walkjump/score_estimation.hpp"
#include "walkjump/smoothing.hpp"

namespace walkjump {

enum class Scheme { Oat, Aao, M1, Direct };
std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

enum class InitKind { ColdUniform, FixedPoint };

// Start of every measurement chain.  ColdUniform draws Unif([box_lo, box_hi]^d)
// plus N(0, sigma^2 I) (no noise for the unsmoothed baseline); FixedPoint
// starts every chain at `point`.
struct InitSpec {
  InitKind kind = InitKind::ColdUniform;
  double box_lo = -1.0;
  double box_hi = 1.0;
  Vector point;
};

enum class ScoreMode { Analytic, PlugIn };
std::string to_string(ScoreMode mode);
ScoreMode score_mode_from_string(const std::string& name);

struct ScoreSpec {
  ScoreMode mode = ScoreMode::Analytic;
  int n_mc = 500;
};

struct SamplerConfig {
  Scheme scheme = Scheme::Oat;
  SmoothingConfig smoothing;
  KernelParams kernel;
  // steps per measurement for OAT, total steps for AAO, M1 and DIRECT
  long n_t = 1000;
  int n_walkers = 1;
  InitSpec init;
  ScoreSpec score;
  // 0 disables trajectory recording; otherwise every stride-th step counted
  // back from the last one is recorded.
  long trajectory_stride = 0;
  // OAT only: also jump from the first t measurements for each listed t.
  std::vector<int> checkpoints;

  long total_steps() const;
  void validate() const;
};

struct TrajectoryRow {
  int walker = 0;
  int t = 0;
  long step = 0;
  Vector position;
  double jump_projection = 0.0;
};

struct SamplerResult {
  SampleMatrix samples;              // one clean sample per walker
  std::uint64_t grad_evals = 0;      // summed over walkers
  std::uint64_t proposals = 0;       // MALA only
  std::uint64_t accepts = 0;
  std::vector<TrajectoryRow> trajectory;  // sorted by (walker, step)
  std::vector<int> checkpoint_t;
  std::vector<SampleMatrix> checkpoint_samples;

  double acceptance_rate() const {
    return proposals == 0 ? 1.0 : static_cast<double>(accepts) / static_cast<double>(proposals);
  }
};

// Walkers run in parallel; walker w draws from streams derived from (seed, w),
// so results do not depend on the thread count.
SamplerResult run_sampler(const TargetModel& model, const SamplerConfig& cfg, std::uint64_t seed);

SamplerResult run_oat(const TargetModel& model, const SamplerConfig& cfg, std::uint64_t seed);
SamplerResult run_aao(const TargetModel& model, const SamplerConfig& cfg, std::uint64_t seed);
SamplerResult run_m1(const TargetModel& model, const SamplerConfig& cfg, std::uint64_t seed);
SamplerResult run_direct(const TargetModel& model, const SamplerConfig& cfg, std::uint64_t seed);

// Fraction of rows on the minor-weight side of the mixture's separating
// hyperplane mu.x = 0.
double minor_mode_fraction(const GaussianMixtureTwo& model, const SampleMatrix& samples);
double minor_mode_fraction(const TargetModel& model, const SampleMatrix& samples);

}  // namespace walkjump
