#include "walkjump/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace walkjump {

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Mala: return "mala";
    case KernelKind::UldSachs: return "uld_sachs";
    case KernelKind::UldCheng: return "uld_cheng";
    case KernelKind::UldShenLee: return "uld_shenlee";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "mala") return KernelKind::Mala;
  if (name == "uld_sachs" || name == "sachs") return KernelKind::UldSachs;
  if (name == "uld_cheng" || name == "cheng") return KernelKind::UldCheng;
  if (name == "uld_shenlee" || name == "shenlee") return KernelKind::UldShenLee;
  throw ConfigError("unknown kernel kind '" + name + "'");
}

KernelParams KernelParams::from_gamma_delta(KernelKind kind, double delta, double gamma_delta,
                                            double L) {
  KernelParams p;
  p.kind = kind;
  p.delta = delta;
  p.gamma = gamma_delta / delta;
  p.L = L;
  p.validate();
  return p;
}

void KernelParams::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("kernel: delta must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("kernel: gamma must be positive");
  if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("kernel: L must be positive");
}

KernelState::KernelState(Vector start, Rng stream)
    : position(std::move(start)), rng(std::move(stream)) {
  const auto d = position.size();
  velocity = Vector::Zero(d);
  score_buf.resize(d);
  noise_buf.resize(d);
  aux_buf.resize(d);
}

void KernelState::reset(const Vector& start) {
  position = start;
  velocity.setZero(start.size());
  score_buf.resize(start.size());
  noise_buf.resize(start.size());
  aux_buf.resize(start.size());
  cache_valid = false;
}

double expm1_residual(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return x2 * (1.0 / 2 + x * (-1.0 / 6 + x * (1.0 / 24 + x * (-1.0 / 120 +
                 x * (1.0 / 720 + x * (-1.0 / 5040 + x * (1.0 / 40320)))))));
  }
  return x + std::expm1(-x);
}

double ou_position_variance_factor(double x) {
  if (std::abs(x) < 1e-2) {
    const double x3 = x * x * x;
    return x3 * (1.0 / 3 + x * (-1.0 / 4 + x * (7.0 / 60 + x * (-1.0 / 24 +
                 x * (31.0 / 2520 + x * (-1.0 / 320))))));
  }
  return x + 2.0 * std::expm1(-x) - 0.5 * std::expm1(-2.0 * x);
}

OuIncrement::OuIncrement(double t, double gamma, double u) {
  const double x = gamma * t;
  const double one_minus = -std::expm1(-x);
  decay = std::exp(-x);
  drift_x = one_minus / gamma;
  force_v = one_minus / gamma;
  force_x = expm1_residual(x) / (gamma * gamma);
  var_x = 2.0 * u * ou_position_variance_factor(x) / (gamma * gamma);
  var_v = -u * std::expm1(-2.0 * x);
  cov = u / gamma * one_minus * one_minus;
  if (var_x > 0.0) {
    l11 = std::sqrt(var_x);
    l21 = cov / l11;
    l22 = std::sqrt(std::max(var_v - l21 * l21, 0.0));
  } else {
    l11 = 0.0;
    l21 = std::sqrt(std::max(var_v, 0.0));
    l22 = 0.0;
  }
}

LangevinKernel::LangevinKernel(const KernelParams& params) : params_(params) {
  params_.validate();
  const double u = params_.inverse_mass();
  kick_ = params_.delta * u / 2.0;
  friction_decay_ = std::exp(-params_.gamma * params_.delta);
  refresh_scale_ = std::sqrt(-u * std::expm1(-2.0 * params_.gamma * params_.delta));
  full_step_ = OuIncrement(params_.delta, params_.gamma, u);
}

}  // namespace walkjump
