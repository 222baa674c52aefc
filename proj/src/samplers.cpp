#include "walkjump/samplers.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <cmath>
#include <algorithm>
#include <limits>
#include <optional>

#include "walkjump/metrics.hpp"

namespace walkjump {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Oat: return "oat";
    case Scheme::Aao: return "aao";
    case Scheme::M1: return "m1";
    case Scheme::Direct: return "direct";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "oat") return Scheme::Oat;
  if (name == "aao") return Scheme::Aao;
  if (name == "m1") return Scheme::M1;
  if (name == "direct") return Scheme::Direct;
  throw ConfigError("unknown scheme '" + name + "'");
}

std::string to_string(ScoreMode mode) {
  return mode == ScoreMode::Analytic ? "analytic" : "plugin";
}

ScoreMode score_mode_from_string(const std::string& name) {
  if (name == "analytic") return ScoreMode::Analytic;
  if (name == "plugin") return ScoreMode::PlugIn;
  throw ConfigError("unknown score mode '" + name + "'");
}

long SamplerConfig::total_steps() const {
  return scheme == Scheme::Oat ? n_t * smoothing.m : n_t;
}

void SamplerConfig::validate() const {
  kernel.validate();
  if (n_t < 1) throw ConfigError("sampler: n_t must be >= 1");
  if (n_walkers < 0) throw ConfigError("sampler: n_walkers must be >= 0");
  if (scheme != Scheme::Direct) SmoothingConfig(smoothing.sigma, smoothing.m);
  if (score.n_mc < 1) throw ConfigError("sampler: score.n_mc must be >= 1");
  if (trajectory_stride < 0) throw ConfigError("sampler: trajectory stride must be >= 0");
  if (init.kind == InitKind::ColdUniform && !(init.box_hi >= init.box_lo))
    throw ConfigError("sampler: init box must satisfy lo <= hi");
  for (int t : checkpoints)
    if (t < 1 || t > smoothing.m) throw ConfigError("sampler: checkpoint outside 1..m");
}

namespace {

// Smoothed score g(y; s) and log-normalizer phi(y; s), either closed form or
// the plug-in estimate with fresh draws per call.
class ScoreOracle {
 public:
  ScoreOracle(const TargetModel& model, const ScoreSpec& spec, Rng rng)
      : model_(model), spec_(spec), rng_(std::move(rng)) {
    if (spec.mode == ScoreMode::Analytic) {
      if (!has_closed_form_smoothing(model))
        throw UnsupportedModel("analytic score requested for a model without closed form");
      mixture_ = std::get_if<GaussianMixtureTwo>(&model);
      gaussian_ = std::get_if<AnisotropicGaussian>(&model);
    }
  }

  void g(const Vector& y, double s, Vector& out) {
    if (spec_.mode == ScoreMode::Analytic) {
      score_smoothed_into(model_, y, s, out);
    } else {
      estimate_score_into(model_, y, s, spec_.n_mc, rng_, ws_, out);
    }
  }

  double phi(const Vector& y, double s) const { return walkjump::phi(model_, y, s); }

  const GaussianMixtureTwo* mixture() const { return mixture_; }
  const AnisotropicGaussian* gaussian() const { return gaussian_; }

 private:
  const TargetModel& model_;
  ScoreSpec spec_;
  Rng rng_;
  PlugInWorkspace ws_;
  const GaussianMixtureTwo* mixture_ = nullptr;
  const AnisotropicGaussian* gaussian_ = nullptr;
};

// p(y_t | y_{1:t-1}) with the running mean refreshed on the fly from the
// current iterate; the committed mean is never touched.
struct ConditionalTarget {
  ScoreOracle& oracle;
  const Vector& prev_mean;
  int t;
  double sigma;
  double s_t;
  Vector mean, g;
  Vector inv_var;  // 1 / (tau_i^2 + s_t^2), Gaussian fast path

  ConditionalTarget(ScoreOracle& o, const Vector& prev, int t_, double sigma_)
      : oracle(o), prev_mean(prev), t(t_), sigma(sigma_),
        s_t(sigma_ / std::sqrt(static_cast<double>(t_))), mean(prev.size()), g(prev.size()) {
    if (const auto* gm = oracle.gaussian())
      inv_var = (gm->variances.array() + s_t * s_t).inverse().matrix();
  }

  void refresh(const Vector& y) { mean = prev_mean + (y - prev_mean) / static_cast<double>(t); }

  void score(const Vector& y, Vector& out) {
    const double inv_t = 1.0 / t;
    const double inv_s2 = 1.0 / (sigma * sigma);
    const Eigen::Index d = y.size();
    if (const auto* mx = oracle.mixture()) {
      double dot = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) {
        mean[i] = prev_mean[i] + (y[i] - prev_mean[i]) * inv_t;
        dot += mx->mu[i] * mean[i];
      }
      const double v = mx->tau2 + s_t * s_t;
      const double z = mx->log_alpha - mx->log_1m_alpha + 2.0 * dot / v;
      const double c = std::tanh(0.5 * z) / v;
      for (Eigen::Index i = 0; i < d; ++i)
        out[i] = (c * mx->mu[i] - mean[i] / v) * inv_t + (mean[i] - y[i]) * inv_s2;
      return;
    }
    if (oracle.gaussian()) {
      for (Eigen::Index i = 0; i < d; ++i) {
        const double mi = prev_mean[i] + (y[i] - prev_mean[i]) * inv_t;
        out[i] = -mi * inv_var[i] * inv_t + (mi - y[i]) * inv_s2;
      }
      return;
    }
    refresh(y);
    oracle.g(mean, s_t, g);
    out = g * inv_t + (mean - y) * inv_s2;
  }

  double log_density(const Vector& y) {
    refresh(y);
    return oracle.phi(mean, s_t) +
           (t * mean.squaredNorm() - y.squaredNorm()) / (2.0 * sigma * sigma);
  }
};

// log p(y_{1:m}) on the stacked vector (y_1, ..., y_m).
struct JointTarget {
  ScoreOracle& oracle;
  Eigen::Index d;
  int m;
  double sigma;
  double s_m;
  Vector mean, g;

  JointTarget(ScoreOracle& o, Eigen::Index d_, int m_, double sigma_)
      : oracle(o), d(d_), m(m_), sigma(sigma_),
        s_m(sigma_ / std::sqrt(static_cast<double>(m_))), mean(d_), g(d_) {}

  void refresh(const Vector& y) {
    mean.setZero();
    for (int t = 0; t < m; ++t) mean += y.segment(t * d, d);
    mean /= static_cast<double>(m);
  }

  void score(const Vector& y, Vector& out) {
    refresh(y);
    oracle.g(mean, s_m, g);
    const Vector common = g / static_cast<double>(m) + mean / (sigma * sigma);
    for (int t = 0; t < m; ++t)
      out.segment(t * d, d) = common - y.segment(t * d, d) / (sigma * sigma);
  }

  double log_density(const Vector& y) {
    refresh(y);
    return oracle.phi(mean, s_m) + (m * mean.squaredNorm() - y.squaredNorm()) / (2.0 * sigma * sigma);
  }
};

struct EnergyTarget {
  const TargetModel& model;
  void score(const Vector& y, Vector& out) {
    grad_energy_into(model, y, out);
    out = -out;
  }
  double log_density(const Vector& y) {
    const double f = energy(model, y);
    return std::isnan(f) ? -std::numeric_limits<double>::infinity() : -f;
  }
};

struct WalkerOutput {
  Vector sample;
  std::uint64_t grad_evals = 0, proposals = 0, accepts = 0;
  std::vector<TrajectoryRow> rows;
  std::vector<Vector> checkpoints;
};

class Recorder {
 public:
  Recorder(long total, long stride, int walker, std::vector<TrajectoryRow>& rows)
      : total_(total), stride_(stride), walker_(walker), rows_(rows) {}

  bool due(long step) const { return stride_ > 0 && (total_ - 1 - step) % stride_ == 0; }

  void add(int t, long step, const Vector& position, double projection) {
    rows_.push_back(TrajectoryRow{walker_, t, step, position, projection});
  }

 private:
  long total_, stride_;
  int walker_;
  std::vector<TrajectoryRow>& rows_;
};

std::optional<Vector> maybe_theta(const TargetModel& model) {
  try {
    return default_theta(model);
  } catch (const UnsupportedModel&) {
    return std::nullopt;
  }
}

double project_or_nan(const std::optional<Vector>& theta, const Vector& x) {
  return theta ? theta->dot(x) : std::numeric_limits<double>::quiet_NaN();
}

void init_point(const InitSpec& init, double noise, Rng& rng, Eigen::Ref<Vector> out) {
  if (init.kind == InitKind::FixedPoint) {
    if (init.point.size() != out.size())
      throw DimensionMismatch("sampler: fixed init point", out.size(), init.point.size());
    out = init.point;
    return;
  }
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] = rng.uniform(init.box_lo, init.box_hi) + noise * rng.normal();
}

[[noreturn]] void rethrow_with_context(const KernelFailure& e, int walker, int t, long step) {
  throw KernelFailure(std::string(e.what()) + " (walker " + std::to_string(walker) + ", t " +
                      std::to_string(t) + ", step " + std::to_string(step) + ")");
}

Vector jump(ScoreOracle& oracle, const Vector& mean, double sigma, int t) {
  const double s = sigma / std::sqrt(static_cast<double>(t));
  Vector g(mean.size());
  oracle.g(mean, s, g);
  return mean + (s * s) * g;
}

WalkerOutput oat_walker(const TargetModel& model, const SamplerConfig& cfg, std::uint64_t seed,
                        int walker, const std::optional<Vector>& theta) {
  const Eigen::Index d = dim(model);
  const int m = cfg.smoothing.m;
  const double sigma = cfg.smoothing.sigma;
  Rng init_rng = Rng::derived(seed, {static_cast<std::uint64_t>(walker), 2});
  ScoreOracle oracle(model, cfg.score, Rng::derived(seed, {static_cast<std::uint64_t>(walker), 1}));
  // a separate oracle keeps diagnostic jumps from perturbing the walk's stream
  ScoreOracle probe(model, cfg.score, Rng::derived(seed, {static_cast<std::uint64_t>(walker), 3}));
  const LangevinKernel kernel(cfg.kernel);
  KernelState state(Vector::Zero(d), Rng::derived(seed, {static_cast<std::uint64_t>(walker), 0}));
  MeasurementAccumulator acc(d);
  WalkerOutput out;
  Recorder rec(cfg.total_steps(), cfg.trajectory_stride, walker, out.rows);
  Vector start(d);
  long global = 0;
  std::size_t next_checkpoint = 0;
  std::vector<int> checkpoints = cfg.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());

  for (int t = 1; t <= m; ++t) {
    init_point(cfg.init, sigma, init_rng, start);
    state.reset(start);
    ConditionalTarget target(oracle, acc.mean(), t, sigma);
    for (long i = 0; i < cfg.n_t; ++i, ++global) {
      try {
        kernel.step(state, target);
      } catch (const KernelFailure& e) {
        rethrow_with_context(e, walker, t, i);
      }
      if (rec.due(global)) {
        target.refresh(state.position);
        rec.add(t, global, state.position, project_or_nan(theta, jump(probe, target.mean, sigma, t)));
      }
    }
    acc.push(state.position);
    while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == t) {
      out.checkpoints.push_back(jump(probe, acc.mean(), sigma, t));
      ++next_checkpoint;
    }
  }
  out.sample = jump(oracle, acc.mean(), sigma, m);
  out.grad_evals = state.score_evals;
  out.proposals = state.proposals;
  out.accepts = state.accepts;
  return out;
}

WalkerOutput aao_walker(const TargetModel& model, const SamplerConfig& cfg, std::uint64_t seed,
                        int walker, const std::optional<Vector>& theta) {
  const Eigen::Index d = dim(model);
  const int m = cfg.smoothing.m;
  const double sigma = cfg.smoothing.sigma;
  Rng init_rng = Rng::derived(seed, {static_cast<std::uint64_t>(walker), 2});
  ScoreOracle oracle(model, cfg.score, Rng::derived(seed, {static_cast<std::uint64_t>(walker), 1}));
  ScoreOracle probe(model, cfg.score, Rng::derived(seed, {static_cast<std::uint64_t>(walker), 3}));
  const LangevinKernel kernel(cfg.kernel);
  Vector start(d * m);
  for (int t = 0; t < m; ++t) init_point(cfg.init, sigma, init_rng, start.segment(t * d, d));
  KernelState state(start, Rng::derived(seed, {static_cast<std::uint64_t>(walker), 0}));
  JointTarget target(oracle, d, m, sigma);
  WalkerOutput out;
  Recorder rec(cfg.total_steps(), cfg.trajectory_stride, walker, out.rows);
  for (long i = 0; i < cfg.n_t; ++i) {
    try {
      kernel.step(state, target);
    } catch (const KernelFailure& e) {
      rethrow_with_context(e, walker, m, i);
    }
    if (rec.due(i)) {
      target.refresh(state.position);
      rec.add(m, i, target.mean, project_or_nan(theta, jump(probe, target.mean, sigma, m)));
    }
  }
  target.refresh(state.position);
  out.sample = jump(oracle, target.mean, sigma, m);
  out.grad_evals = state.score_evals;
  out.proposals = state.proposals;
  out.accepts = state.accepts;
  return out;
}

WalkerOutput direct_walker(const TargetModel& model, const SamplerConfig& cfg, std::uint64_t seed,
                           int walker, const std::optional<Vector>& theta) {
  const Eigen::Index d = dim(model);
  Rng init_rng = Rng::derived(seed, {static_cast<std::uint64_t>(walker), 2});
  Vector start(d);
  init_point(cfg.init, 0.0, init_rng, start);
  const LangevinKernel kernel(cfg.kernel);
  KernelState state(start, Rng::derived(seed, {static_cast<std::uint64_t>(walker), 0}));
  EnergyTarget target{model};
  WalkerOutput out;
  Recorder rec(cfg.total_steps(), cfg.trajectory_stride, walker, out.rows);
  for (long i = 0; i < cfg.n_t; ++i) {
    try {
      kernel.step(state, target);
    } catch (const KernelFailure& e) {
      rethrow_with_context(e, walker, 0, i);
    }
    if (rec.due(i)) rec.add(0, i, state.position, project_or_nan(theta, state.position));
  }
  out.sample = state.position;
  out.grad_evals = state.score_evals;
  out.proposals = state.proposals;
  out.accepts = state.accepts;
  return out;
}

SamplerResult collect(std::vector<WalkerOutput>& outs, Eigen::Index d,
                      const std::vector<int>& checkpoints) {
  SamplerResult r;
  const auto n = static_cast<Eigen::Index>(outs.size());
  r.samples.resize(n, d);
  std::vector<int> cps = checkpoints;
  std::sort(cps.begin(), cps.end());
  r.checkpoint_t = cps;
  r.checkpoint_samples.assign(cps.size(), SampleMatrix(n, d));
  for (Eigen::Index w = 0; w < n; ++w) {
    auto& o = outs[static_cast<std::size_t>(w)];
    r.samples.row(w) = o.sample.transpose();
    r.grad_evals += o.grad_evals;
    r.proposals += o.proposals;
    r.accepts += o.accepts;
    for (std::size_t k = 0; k < o.checkpoints.size() && k < cps.size(); ++k)
      r.checkpoint_samples[k].row(w) = o.checkpoints[k].transpose();
    for (auto& row : o.rows) r.trajectory.push_back(std::move(row));
  }
  return r;
}

template <class Walker>
SamplerResult run_walkers(const TargetModel& model, const SamplerConfig& cfg, std::uint64_t seed,
                          Walker walker_fn) {
  cfg.validate();
  const auto theta = maybe_theta(model);
  std::vector<WalkerOutput> outs(static_cast<std::size_t>(cfg.n_walkers));
  tbb::parallel_for(tbb::blocked_range<int>(0, cfg.n_walkers), [&](const tbb::blocked_range<int>& r) {
    for (int w = r.begin(); w != r.end(); ++w)
      outs[static_cast<std::size_t>(w)] = walker_fn(model, cfg, seed, w, theta);
  });
  return collect(outs, dim(model), cfg.scheme == Scheme::Oat ? cfg.checkpoints : std::vector<int>{});
}

}  // namespace

SamplerResult run_oat(const TargetModel& model, const SamplerConfig& cfg, std::uint64_t seed) {
  return run_walkers(model, cfg, seed, oat_walker);
}

SamplerResult run_m1(const TargetModel& model, const SamplerConfig& cfg, std::uint64_t seed) {
  SamplerConfig c = cfg;
  c.scheme = Scheme::Oat;
  c.smoothing.m = 1;
  c.checkpoints.clear();
  return run_walkers(model, c, seed, oat_walker);
}

SamplerResult run_aao(const TargetModel& model, const SamplerConfig& cfg, std::uint64_t seed) {
  return run_walkers(model, cfg, seed, aao_walker);
}

SamplerResult run_direct(const TargetModel& model, const SamplerConfig& cfg, std::uint64_t seed) {
  return run_walkers(model, cfg, seed, direct_walker);
}

SamplerResult run_sampler(const TargetModel& model, const SamplerConfig& cfg, std::uint64_t seed) {
  switch (cfg.scheme) {
    case Scheme::Oat: return run_oat(model, cfg, seed);
    case Scheme::Aao: return run_aao(model, cfg, seed);
    case Scheme::M1: return run_m1(model, cfg, seed);
    case Scheme::Direct: return run_direct(model, cfg, seed);
  }
  throw ConfigError("unknown scheme");
}

double minor_mode_fraction(const GaussianMixtureTwo& model, const SampleMatrix& samples) {
  if (samples.rows() == 0) return std::nan("");
  if (samples.cols() != model.dim()) throw DimensionMismatch("minor_mode_fraction", model.dim(), samples.cols());
  const Vector proj = samples * model.mu;
  const double sign = model.minor_sign();
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < proj.size(); ++i) count += (sign * proj[i] > 0.0) ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(samples.rows());
}

double minor_mode_fraction(const TargetModel& model, const SampleMatrix& samples) {
  if (const auto* m = std::get_if<GaussianMixtureTwo>(&model)) return minor_mode_fraction(*m, samples);
  return std::nan("");
}

}  // namespace walkjump
