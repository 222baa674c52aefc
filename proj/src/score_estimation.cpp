#include "walkjump/score_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace walkjump {

double log_sum_exp(const double* first, const double* last) {
  if (first == last) return -std::numeric_limits<double>::infinity();
  const double hi = *std::max_element(first, last);
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (const double* p = first; p != last; ++p) sum += std::exp(*p - hi);
  return hi + std::log(sum);
}

void estimate_score_from_draws_into(const TargetModel& model, ConstRef y, double sigma,
                                    const SampleMatrix& eps, PlugInWorkspace& ws,
                                    Eigen::Ref<Vector> out) {
  const Eigen::Index d = dim(model);
  if (y.size() != d) throw DimensionMismatch("estimate_score", d, y.size());
  if (eps.cols() != d) throw DimensionMismatch("estimate_score draws", d, eps.cols());
  if (!(sigma > 0.0)) throw Error("estimate_score: sigma must be > 0");
  const Eigen::Index n = eps.rows();
  if (n < 1) throw Error("estimate_score: need at least one draw");

  ws.log_weights.resize(n);
  ws.point.resize(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    ws.point = y + sigma * eps.row(i).transpose();
    const double lw = -energy(model, ws.point);
    ws.log_weights[i] = std::isnan(lw) ? -std::numeric_limits<double>::infinity() : lw;
  }
  const double* lw = ws.log_weights.data();
  const double log_a = log_sum_exp(lw, lw + n);
  if (!std::isfinite(log_a))
    throw DegenerateWeights("estimate_score: every importance weight is zero or non-finite");

  ws.terms.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < d; ++j) {
    std::size_t n_pos = 0;
    std::size_t n_neg = static_cast<std::size_t>(n);
    // positive components fill from the front, negative from the back
    for (Eigen::Index i = 0; i < n; ++i) {
      const double e = eps(i, j);
      if (e > 0.0)
        ws.terms[n_pos++] = std::log(e) + lw[i];
      else if (e < 0.0)
        ws.terms[--n_neg] = std::log(-e) + lw[i];
    }
    const double* base = ws.terms.data();
    const double log_b_pos = log_sum_exp(base, base + n_pos);
    const double log_b_neg = log_sum_exp(base + n_neg, base + n);
    out[j] = (std::exp(log_b_pos - log_a) - std::exp(log_b_neg - log_a)) / sigma;
  }
}

Vector estimate_score_from_draws(const TargetModel& model, ConstRef y, double sigma,
                                 const SampleMatrix& eps) {
  PlugInWorkspace ws;
  Vector out(dim(model));
  estimate_score_from_draws_into(model, y, sigma, eps, ws, out);
  return out;
}

void estimate_score_into(const TargetModel& model, ConstRef y, double sigma, int n, Rng& rng,
                         PlugInWorkspace& ws, Eigen::Ref<Vector> out) {
  if (n < 1) throw Error("estimate_score: n must be >= 1");
  ws.eps.resize(n, dim(model));
  for (Eigen::Index i = 0; i < ws.eps.size(); ++i) ws.eps.data()[i] = rng.normal();
  estimate_score_from_draws_into(model, y, sigma, ws.eps, ws, out);
}

Vector estimate_score(const TargetModel& model, ConstRef y, double sigma, const PlugInConfig& cfg) {
  Rng rng(cfg.seed);
  PlugInWorkspace ws;
  Vector out(dim(model));
  estimate_score_into(model, y, sigma, cfg.n, rng, ws, out);
  return out;
}

Vector estimate_score_conditional(const TargetModel& model, ConstRef y_t,
                                  const MeasurementAccumulator& acc, double sigma,
                                  const PlugInConfig& cfg) {
  if (acc.t() < 1) throw Error("estimate_score_conditional: accumulator holds no measurement");
  const double s = sigma / std::sqrt(static_cast<double>(acc.t()));
  const Vector g = estimate_score(model, acc.mean(), s, cfg);
  Vector out(y_t.size());
  combine_conditional_score(g, acc.mean(), y_t, acc.t(), sigma, out);
  return out;
}

}  // namespace walkjump
