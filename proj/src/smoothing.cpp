#include "walkjump/smoothing.hpp"

#include <cmath>

namespace walkjump {

namespace {

void check_dim(const char* what, Eigen::Index expected, Eigen::Index got) {
  if (expected != got) throw DimensionMismatch(what, expected, got);
}

void check_scale(const char* what, double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw Error(std::string(what) + ": noise level must be >= 0");
}

[[noreturn]] void unsupported(const char* what) {
  throw UnsupportedModel(std::string(what) +
                         ": no closed form for generic energies (use the plug-in estimator)");
}

}  // namespace

SmoothingConfig::SmoothingConfig(double sigma_, int m_) : sigma(sigma_), m(m_) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error("SmoothingConfig: sigma must be > 0");
  if (m < 1) throw Error("SmoothingConfig: m must be >= 1");
}

void MeasurementAccumulator::push(ConstRef y) {
  check_dim("MeasurementAccumulator::push", mean_.size(), y.size());
  ++t_;
  mean_ += (y - mean_) / static_cast<double>(t_);
}

void MeasurementAccumulator::mean_with(ConstRef y, Eigen::Ref<Vector> out) const {
  check_dim("MeasurementAccumulator::mean_with", mean_.size(), y.size());
  out = mean_ + (y - mean_) / static_cast<double>(t_ + 1);
}

MeasurementAccumulator MeasurementAccumulator::with(ConstRef y) const {
  MeasurementAccumulator next = *this;
  next.push(y);
  return next;
}

double logistic_variance_factor(double z) {
  const double e = std::exp(-std::abs(z));
  const double denom = 1.0 + e;
  return 4.0 * e / (denom * denom);
}

double phi(const TargetModel& model, ConstRef y, double s) {
  check_dim("phi", dim(model), y.size());
  check_scale("phi", s);
  const double s2 = s * s;
  if (const auto* g = std::get_if<AnisotropicGaussian>(&model)) {
    const Eigen::ArrayXd v = g->variances.array() + s2;
    return -0.5 * (y.array().square() / v).sum() + 0.5 * (g->variances.array() / v).log().sum();
  }
  if (const auto* m = std::get_if<GaussianMixtureTwo>(&model)) {
    const double v = m->tau2 + s2;
    const double a = m->log_alpha - (y - m->mu).squaredNorm() / (2.0 * v);
    const double b = m->log_1m_alpha - (y + m->mu).squaredNorm() / (2.0 * v);
    return 0.5 * static_cast<double>(m->dim()) * std::log(m->tau2 / v) + log_add_exp(a, b);
  }
  unsupported("phi");
}

void score_smoothed_into(const TargetModel& model, ConstRef y, double s, Eigen::Ref<Vector> out) {
  check_dim("score_smoothed", dim(model), y.size());
  const double s2 = s * s;
  if (const auto* g = std::get_if<AnisotropicGaussian>(&model)) {
    out = -y.cwiseQuotient((g->variances.array() + s2).matrix());
    return;
  }
  if (const auto* m = std::get_if<GaussianMixtureTwo>(&model)) {
    const double v = m->tau2 + s2;
    const double r = plus_responsibility(*m, y, v);
    out = ((2.0 * r - 1.0) * m->mu - y) / v;
    return;
  }
  unsupported("score_smoothed");
}

Vector score_smoothed(const TargetModel& model, ConstRef y, double s) {
  check_scale("score_smoothed", s);
  Vector out(y.size());
  score_smoothed_into(model, y, s, out);
  return out;
}

Matrix hessian_smoothed(const TargetModel& model, ConstRef y, double s) {
  check_dim("hessian_smoothed", dim(model), y.size());
  check_scale("hessian_smoothed", s);
  const double s2 = s * s;
  if (const auto* g = std::get_if<AnisotropicGaussian>(&model)) {
    return (-(g->variances.array() + s2).inverse()).matrix().asDiagonal();
  }
  if (const auto* m = std::get_if<GaussianMixtureTwo>(&model)) {
    const double v = m->tau2 + s2;
    const double z = m->log_alpha - m->log_1m_alpha + 2.0 * m->mu.dot(y) / v;
    const double w = logistic_variance_factor(z);
    Matrix h = (w / (v * v)) * (m->mu * m->mu.transpose());
    h.diagonal().array() -= 1.0 / v;
    return h;
  }
  unsupported("hessian_smoothed");
}

void combine_conditional_score(ConstRef g_at_mean, ConstRef mean, ConstRef y_t, int t,
                               double sigma, Eigen::Ref<Vector> out) {
  out = g_at_mean / static_cast<double>(t) + (mean - y_t) / (sigma * sigma);
}

Vector score_conditional(const TargetModel& model, ConstRef y_t, const MeasurementAccumulator& acc,
                         double sigma) {
  if (acc.t() < 1) throw Error("score_conditional: accumulator holds no measurement (t = 0)");
  check_dim("score_conditional", dim(model), y_t.size());
  const SmoothingConfig cfg(sigma, acc.t());
  Vector g(y_t.size());
  score_smoothed_into(model, acc.mean(), cfg.effective_sigma(), g);
  Vector out(y_t.size());
  combine_conditional_score(g, acc.mean(), y_t, acc.t(), sigma, out);
  return out;
}

Vector bayes_jump_from_mean(const TargetModel& model, ConstRef mean, const SmoothingConfig& config) {
  const double s = config.effective_sigma();
  Vector g(mean.size());
  score_smoothed_into(model, mean, s, g);
  return mean + (s * s) * g;
}

Vector bayes_jump(const TargetModel& model, const MeasurementAccumulator& acc,
                  const SmoothingConfig& config) {
  if (acc.t() != config.m)
    throw Error("bayes_jump: accumulator holds " + std::to_string(acc.t()) +
                " measurements but m = " + std::to_string(config.m));
  return bayes_jump_from_mean(model, acc.mean(), config);
}

Matrix hessian_conditional_from_mean(const TargetModel& model, ConstRef mean,
                                     const SmoothingConfig& config) {
  const double m = config.m;
  Matrix h = hessian_smoothed(model, mean, config.effective_sigma()) / (m * m);
  h.diagonal().array() += (1.0 / m - 1.0) / (config.sigma * config.sigma);
  return h;
}

Matrix hessian_conditional(const TargetModel& model, const MeasurementAccumulator& acc,
                           const SmoothingConfig& config) {
  if (acc.t() != config.m)
    throw Error("hessian_conditional: accumulator holds " + std::to_string(acc.t()) +
                " measurements but m = " + std::to_string(config.m));
  return hessian_conditional_from_mean(model, acc.mean(), config);
}

Matrix posterior_covariance(const TargetModel& model, ConstRef mean, const SmoothingConfig& config) {
  check_dim("posterior_covariance", dim(model), mean.size());
  const double s2 = config.effective_variance();
  if (const auto* g = std::get_if<AnisotropicGaussian>(&model)) {
    const Eigen::ArrayXd v = g->variances.array();
    return (v * s2 / (v + s2)).matrix().asDiagonal();
  }
  if (const auto* m = std::get_if<GaussianMixtureTwo>(&model)) {
    const double v = m->tau2 + s2;
    const double z = m->log_alpha - m->log_1m_alpha + 2.0 * m->mu.dot(mean) / v;
    const double shrink = s2 / v;
    Matrix c = (shrink * shrink * logistic_variance_factor(z)) * (m->mu * m->mu.transpose());
    c.diagonal().array() += m->tau2 * s2 / v;
    return c;
  }
  unsupported("posterior_covariance");
}

double conditional_log_density(const TargetModel& model, ConstRef y_t, ConstRef prev_mean, int t,
                               double sigma) {
  if (t < 1) throw Error("conditional_log_density: t must be >= 1");
  check_dim("conditional_log_density", dim(model), y_t.size());
  const Vector mean = prev_mean + (y_t - prev_mean) / static_cast<double>(t);
  const double s2 = sigma * sigma;
  return phi(model, mean, sigma / std::sqrt(static_cast<double>(t))) +
         (t * mean.squaredNorm() - y_t.squaredNorm()) / (2.0 * s2);
}

double joint_log_density(const TargetModel& model, const SampleMatrix& ys, double sigma) {
  const Eigen::Index m = ys.rows();
  if (m < 1) throw Error("joint_log_density: need at least one measurement");
  check_dim("joint_log_density", dim(model), ys.cols());
  const Vector mean = ys.colwise().mean().transpose();
  const double sum_sq = ys.squaredNorm();
  const double s2 = sigma * sigma;
  return phi(model, mean, sigma / std::sqrt(static_cast<double>(m))) +
         (m * mean.squaredNorm() - sum_sq) / (2.0 * s2);
}

}  // namespace walkjump
