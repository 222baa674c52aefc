#pragma once

#include <cstdint>
#include <vector>

#include "walkjump/smoothing.hpp"

namespace walkjump {

// Monte-Carlo plug-in estimate of the smoothed score g(y; sigma) for any
// energy.  Draws n standard normal vectors eps_i and returns
//   (1/sigma) sum_i eps_i e^{-f(y + sigma eps_i)} / sum_i e^{-f(y + sigma eps_i)},
// with numerator and denominator built from the same draws.  Every sum is
// taken in the log domain; for each coordinate the positive and negative
// components of eps enter separate log-sum-exps (a zero component enters
// neither).
struct PlugInConfig {
  int n = 500;
  std::uint64_t seed = 0;
};

// Scratch buffers reused across calls by one walker.
struct PlugInWorkspace {
  SampleMatrix eps;
  Vector log_weights;
  Vector point;
  std::vector<double> terms;
};

// Estimate from explicit draws (rows of `eps`).
Vector estimate_score_from_draws(const TargetModel& model, ConstRef y, double sigma,
                                 const SampleMatrix& eps);
void estimate_score_from_draws_into(const TargetModel& model, ConstRef y, double sigma,
                                    const SampleMatrix& eps, PlugInWorkspace& ws,
                                    Eigen::Ref<Vector> out);

// Fresh draws from the caller's stream.
void estimate_score_into(const TargetModel& model, ConstRef y, double sigma, int n, Rng& rng,
                         PlugInWorkspace& ws, Eigen::Ref<Vector> out);

// Fresh draws from a stream seeded by cfg.seed; identical inputs give
// bitwise identical outputs.
Vector estimate_score(const TargetModel& model, ConstRef y, double sigma, const PlugInConfig& cfg);

// Plug-in version of the conditional score: (1/t) g_hat(mean; sigma/sqrt(t)) + (mean - y_t)/sigma^2.
Vector estimate_score_conditional(const TargetModel& model, ConstRef y_t,
                                  const MeasurementAccumulator& acc, double sigma,
                                  const PlugInConfig& cfg);

// log(sum_i exp(a_i)); -inf for an empty range.
double log_sum_exp(const double* first, const double* last);

}  // namespace walkjump
