#pragma once

#include <cmath>

#include "walkjump/target_models.hpp"

namespace walkjump {

// Noise level sigma and number of measurements m of a (sigma, m)-density.
// The effective noise sigma / sqrt(m) is derived, never stored.
struct SmoothingConfig {
  double sigma = 1.0;
  int m = 1;

  SmoothingConfig() = default;
  SmoothingConfig(double sigma_, int m_);
  double effective_sigma() const { return sigma / std::sqrt(static_cast<double>(m)); }
  double effective_variance() const { return sigma * sigma / m; }
};

// Non-Markovian state of one walker: number of committed measurements and
// their running mean.  Nothing else about the history is retained.
class MeasurementAccumulator {
 public:
  explicit MeasurementAccumulator(Eigen::Index d) : mean_(Vector::Zero(d)) {}

  int t() const { return t_; }
  const Vector& mean() const { return mean_; }
  Eigen::Index dim() const { return mean_.size(); }

  void push(ConstRef y);

  // Running mean as if `y` were pushed, written to `out`; state is unchanged.
  void mean_with(ConstRef y, Eigen::Ref<Vector> out) const;

  // Copy of this accumulator with `y` pushed.
  MeasurementAccumulator with(ConstRef y) const;

 private:
  int t_ = 0;
  Vector mean_;
};

// phi(y; s) = log E_{x ~ N(y, s^2 I)}[e^{-f(x)}] with the model's energy
// constant (see target_models.hpp); exact, no additional constant.
double phi(const TargetModel& model, ConstRef y, double s);

// g(y; s) = grad phi(y; s), the score of the s-smoothed density.
Vector score_smoothed(const TargetModel& model, ConstRef y, double s);
void score_smoothed_into(const TargetModel& model, ConstRef y, double s, Eigen::Ref<Vector> out);

// H(y; s) = hessian of phi(y; s).
Matrix hessian_smoothed(const TargetModel& model, ConstRef y, double s);

// (1/t) g + (mean - y_t) / sigma^2 given g = g(mean; sigma/sqrt(t)).
void combine_conditional_score(ConstRef g_at_mean, ConstRef mean, ConstRef y_t, int t,
                               double sigma, Eigen::Ref<Vector> out);

// Score of p(y_t | y_{1:t-1}).  `acc` already includes y_t.
Vector score_conditional(const TargetModel& model, ConstRef y_t, const MeasurementAccumulator& acc,
                         double sigma);

// E[X | y_{1:m}] = mean + (sigma^2/m) g(mean; sigma/sqrt(m)).
Vector bayes_jump(const TargetModel& model, const MeasurementAccumulator& acc,
                  const SmoothingConfig& config);
// Same map from the running mean directly.
Vector bayes_jump_from_mean(const TargetModel& model, ConstRef mean, const SmoothingConfig& config);

// Hessian of log p(y_m | y_{1:m-1}) with respect to y_m; acc.t() must equal config.m.
Matrix hessian_conditional(const TargetModel& model, const MeasurementAccumulator& acc,
                           const SmoothingConfig& config);
Matrix hessian_conditional_from_mean(const TargetModel& model, ConstRef mean,
                                     const SmoothingConfig& config);

// cov(X | y_{1:t}) as a function of the running mean.
Matrix posterior_covariance(const TargetModel& model, ConstRef mean, const SmoothingConfig& config);

// log p(y_t | y_{1:t-1}) up to a constant independent of y_t, given the mean
// of the previous t-1 measurements.
double conditional_log_density(const TargetModel& model, ConstRef y_t, ConstRef prev_mean, int t,
                               double sigma);

// log p(y_{1:m}) up to a constant; rows of `ys` are the measurements.
double joint_log_density(const TargetModel& model, const SampleMatrix& ys, double sigma);

// 4 r (1 - r) for r = sigmoid(z), evaluated without positive exponents.
double logistic_variance_factor(double z);

}  // namespace walkjump
