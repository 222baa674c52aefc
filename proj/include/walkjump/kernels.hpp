#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "walkjump/rng.hpp"
#include "walkjump/types.hpp"

namespace walkjump {

enum class KernelKind { Mala, UldSachs, UldCheng, UldShenLee };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

// Step size delta, friction gamma and Lipschitz parameter L (u = 1/L is the
// inverse mass of the underdamped dynamics).  MALA uses only delta.
struct KernelParams {
  double delta = 0.03;
  double gamma = 5.0 / 3.0;
  double L = 1.0;
  KernelKind kind = KernelKind::UldSachs;

  static KernelParams from_gamma_delta(KernelKind kind, double delta, double gamma_delta, double L);
  double gamma_delta() const { return gamma * delta; }
  double inverse_mass() const { return 1.0 / L; }
  void validate() const;
};

// One walker.  Velocity starts at zero; score_evals counts every call into
// the target's score.
struct KernelState {
  Vector position;
  Vector velocity;
  Rng rng;
  std::uint64_t score_evals = 0;
  std::uint64_t proposals = 0;
  std::uint64_t accepts = 0;

  // scratch, reused across steps
  Vector score_buf;
  Vector noise_buf;
  Vector aux_buf;
  // MALA cache of log density and score at the current position
  bool cache_valid = false;
  double cached_log_density = 0.0;
  Vector cached_score;

  KernelState(Vector start, Rng stream);
  // New start point: zero velocity, drop MALA cache.
  void reset(const Vector& start);
  void invalidate() { cache_valid = false; }
};

// Moments of the underdamped OU increment over a duration t with a constant
// force G: x(t) = x + drift_x v + force_x u G + Wx, v(t) = decay v + force_v u G + Wv,
// with (Wx, Wv) ~ N(0, [[var_x, cov], [cov, var_v]]) per coordinate.
struct OuIncrement {
  double decay = 1.0;
  double drift_x = 0.0;
  double force_x = 0.0;
  double force_v = 0.0;
  double var_x = 0.0;
  double var_v = 0.0;
  double cov = 0.0;
  // lower Cholesky factor of the 2x2 covariance
  double l11 = 0.0, l21 = 0.0, l22 = 0.0;

  OuIncrement() = default;
  OuIncrement(double t, double gamma, double u);
};

// x - (1 - e^{-x}) and x - 2(1 - e^{-x}) + (1 - e^{-2x})/2, accurate for small x.
double expm1_residual(double x);
double ou_position_variance_factor(double x);

namespace detail {

inline void require_finite(const Vector& g, const char* kernel) {
  if (!g.allFinite()) throw KernelFailure(std::string(kernel) + ": non-finite score");
}

template <class Target>
void eval_score(KernelState& s, Target& target, const Vector& at, Vector& out, const char* kernel) {
  target.score(at, out);
  ++s.score_evals;
  require_finite(out, kernel);
}

}  // namespace detail

// Precomputed coefficients for one parameter set.
class LangevinKernel {
 public:
  explicit LangevinKernel(const KernelParams& params);

  const KernelParams& params() const { return params_; }
  int score_evals_per_step() const { return params_.kind == KernelKind::UldShenLee ? 2 : 1; }

  // Target must provide score(const Vector&, Vector&) (gradient of the log
  // density) and, for MALA, log_density(const Vector&).
  template <class Target>
  void step(KernelState& s, Target& target) const {
    switch (params_.kind) {
      case KernelKind::UldSachs: return step_sachs(s, target);
      case KernelKind::UldCheng: return step_cheng(s, target);
      case KernelKind::UldShenLee: return step_shenlee(s, target);
      case KernelKind::Mala: step_mala(s, target); return;
    }
  }

  // Underdamped Langevin step of Sachs et al.: half drift, one score
  // evaluation, kick, OU refresh with a second kick, half drift.
  template <class Target>
  void step_sachs(KernelState& s, Target& target) const {
    const double half = 0.5 * params_.delta;
    const Eigen::Index d = s.position.size();
    double* x = s.position.data();
    double* v = s.velocity.data();
    for (Eigen::Index i = 0; i < d; ++i) x[i] += half * v[i];
    detail::eval_score(s, target, s.position, s.score_buf, "ULD (Sachs)");
    const double* g = s.score_buf.data();
    for (Eigen::Index i = 0; i < d; ++i) {
      const double kicked = v[i] + kick_ * g[i];
      v[i] = friction_decay_ * kicked + kick_ * g[i] + refresh_scale_ * s.rng.normal();
      x[i] += half * v[i];
    }
  }

  // Exact Gaussian transition of the underdamped SDE with the score frozen
  // at the current position.
  template <class Target>
  void step_cheng(KernelState& s, Target& target) const {
    detail::eval_score(s, target, s.position, s.score_buf, "ULD (Cheng)");
    const OuIncrement& c = full_step_;
    const double u = params_.inverse_mass();
    for (Eigen::Index i = 0; i < s.position.size(); ++i) {
      const double z1 = s.rng.normal();
      const double z2 = s.rng.normal();
      const double v = s.velocity[i];
      const double g = u * s.score_buf[i];
      s.position[i] += c.drift_x * v + c.force_x * g + c.l11 * z1;
      s.velocity[i] = c.decay * v + c.force_v * g + c.l21 * z1 + c.l22 * z2;
    }
  }

  // Randomized midpoint method of Shen and Lee: the force integral over the
  // step is replaced by its value at a uniformly random time, where the
  // position is predicted with the score frozen at the start.
  template <class Target>
  void step_shenlee(KernelState& s, Target& target) const {
    const double h = params_.delta;
    const double gamma = params_.gamma;
    const double u = params_.inverse_mass();
    const double a = h * s.rng.uniform();
    const double b = h - a;
    const OuIncrement first(a, gamma, u);
    const OuIncrement second(b, gamma, u);
    const double decay_b = second.decay;
    const double drift_b = second.drift_x;

    detail::eval_score(s, target, s.position, s.score_buf, "ULD (Shen-Lee)");
    Vector& mid = s.aux_buf;
    mid.resize(s.position.size());
    s.noise_buf.resize(4 * s.position.size());
    const Eigen::Index d = s.position.size();
    for (Eigen::Index i = 0; i < d; ++i) {
      const double z1 = s.rng.normal(), z2 = s.rng.normal();
      const double z3 = s.rng.normal(), z4 = s.rng.normal();
      const double n1 = first.l11 * z1, m1 = first.l21 * z1 + first.l22 * z2;
      const double n2 = second.l11 * z3, m2 = second.l21 * z3 + second.l22 * z4;
      s.noise_buf[i] = n1;                              // midpoint position noise
      s.noise_buf[d + i] = n1 + drift_b * m1 + n2;      // full-step position noise
      s.noise_buf[2 * d + i] = decay_b * m1 + m2;       // full-step velocity noise
      mid[i] = s.position[i] + first.drift_x * s.velocity[i] +
               first.force_x * u * s.score_buf[i] + n1;
    }
    detail::eval_score(s, target, mid, s.score_buf, "ULD (Shen-Lee)");
    for (Eigen::Index i = 0; i < d; ++i) {
      const double g = u * s.score_buf[i];
      const double v = s.velocity[i];
      s.position[i] += full_step_.drift_x * v + h * drift_b * g + s.noise_buf[d + i];
      s.velocity[i] = full_step_.decay * v + h * decay_b * g + s.noise_buf[2 * d + i];
    }
  }

  // Metropolis-adjusted Langevin: proposal x + delta s(x) + sqrt(2 delta) xi,
  // accepted with the Hastings ratio of the Gaussian proposal.
  template <class Target>
  bool step_mala(KernelState& s, Target& target) const {
    const double delta = params_.delta;
    if (!s.cache_valid) {
      s.cached_log_density = target.log_density(s.position);
      s.cached_score.resize(s.position.size());
      detail::eval_score(s, target, s.position, s.cached_score, "MALA");
      s.cache_valid = true;
    }
    Vector& proposal = s.aux_buf;
    s.noise_buf.resize(s.position.size());
    s.rng.fill_normal(s.noise_buf);
    proposal = s.position + delta * s.cached_score + std::sqrt(2.0 * delta) * s.noise_buf;
    ++s.proposals;

    const double logp_new = target.log_density(proposal);
    if (!std::isfinite(logp_new)) {
      s.rng.uniform();  // keep the stream aligned with accepted steps
      return false;
    }
    target.score(proposal, s.score_buf);
    ++s.score_evals;
    if (!s.score_buf.allFinite()) {
      s.rng.uniform();
      return false;
    }
    const double forward = s.noise_buf.squaredNorm() / 2.0;
    const double backward =
        (s.position - proposal - delta * s.score_buf).squaredNorm() / (4.0 * delta);
    const double log_ratio = logp_new - s.cached_log_density - backward + forward;
    const double draw = s.rng.uniform();
    if (log_ratio >= 0.0 || std::log(draw) < log_ratio) {
      s.position.swap(proposal);
      s.cached_score.swap(s.score_buf);
      s.cached_log_density = logp_new;
      ++s.accepts;
      return true;
    }
    return false;
  }

  const OuIncrement& full_step() const { return full_step_; }

 private:
  KernelParams params_;
  double kick_ = 0.0;
  double friction_decay_ = 1.0;
  double refresh_scale_ = 0.0;
  OuIncrement full_step_;
};

// One-off convenience wrappers.
template <class Target>
void step_sachs(KernelState& s, Target& target, const KernelParams& p) {
  LangevinKernel(p).step_sachs(s, target);
}
template <class Target>
void step_cheng(KernelState& s, Target& target, const KernelParams& p) {
  LangevinKernel(p).step_cheng(s, target);
}
template <class Target>
void step_shenlee(KernelState& s, Target& target, const KernelParams& p) {
  LangevinKernel(p).step_shenlee(s, target);
}
template <class Target>
bool step_mala(KernelState& s, Target& target, const KernelParams& p) {
  return LangevinKernel(p).step_mala(s, target);
}

}  // namespace walkjump
