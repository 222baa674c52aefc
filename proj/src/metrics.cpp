#include "walkjump/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace walkjump {

Vector normalized(ConstRef theta) {
  const double n = theta.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw Error("projection direction must be nonzero and finite");
  return theta / n;
}

double w2_sorted(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size())
    throw DimensionMismatch("sliced_w2: sample counts differ", static_cast<long>(a.size()),
                            static_cast<long>(b.size()));
  if (a.empty()) throw Error("sliced_w2: empty sample sets");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return std::sqrt(acc / static_cast<double>(a.size()));
}

namespace {

std::vector<double> project(const SampleMatrix& xs, const Vector& theta) {
  if (!xs.allFinite()) throw Error("sliced_w2: non-finite sample");
  std::vector<double> out(static_cast<std::size_t>(xs.rows()));
  Eigen::Map<Vector>(out.data(), xs.rows()) = xs * theta;
  return out;
}

}  // namespace

double sliced_w2(const SampleMatrix& xs, const SampleMatrix& ys, ConstRef theta) {
  if (xs.cols() != theta.size()) throw DimensionMismatch("sliced_w2", theta.size(), xs.cols());
  if (ys.cols() != theta.size()) throw DimensionMismatch("sliced_w2", theta.size(), ys.cols());
  if (std::abs(theta.norm() - 1.0) > 1e-12) throw Error("sliced_w2: theta must have unit norm");
  if (xs.rows() != ys.rows())
    throw DimensionMismatch("sliced_w2: sample counts differ", xs.rows(), ys.rows());
  const Vector t = theta;
  return w2_sorted(project(xs, t), project(ys, t));
}

double sliced_w2(const SampleMatrix& xs, const SampleMatrix& ys, const SlicedW2Config& cfg) {
  return sliced_w2(xs, ys, cfg.theta);
}

std::pair<SampleMatrix, SampleMatrix> equalize_counts(const SampleMatrix& xs,
                                                      const SampleMatrix& ys, Rng& rng) {
  if (xs.rows() == ys.rows()) return {xs, ys};
  const bool x_larger = xs.rows() > ys.rows();
  const SampleMatrix& big = x_larger ? xs : ys;
  const Eigen::Index n = std::min(xs.rows(), ys.rows());
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(big.rows()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::mt19937_64 urbg(rng.engine()());
  std::shuffle(idx.begin(), idx.end(), urbg);
  SampleMatrix cut(n, big.cols());
  for (Eigen::Index i = 0; i < n; ++i) cut.row(i) = big.row(idx[static_cast<std::size_t>(i)]);
  return x_larger ? std::make_pair(cut, ys) : std::make_pair(xs, cut);
}

Vector default_theta(const TargetModel& model) {
  if (const auto* g = std::get_if<AnisotropicGaussian>(&model)) {
    Eigen::Index k = 0;
    g->variances.minCoeff(&k);
    return Vector::Unit(g->dim(), k);
  }
  if (const auto* m = std::get_if<GaussianMixtureTwo>(&model)) return normalized(m->mu);
  const auto& e = std::get<GenericEnergy>(model);
  if (!e.direction) throw UnsupportedModel("default_theta: generic energy declares no direction");
  return normalized(*e.direction);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.n = values.size();
  s.median = quantile(values, 0.5);
  s.q25 = quantile(values, 0.25);
  s.q75 = quantile(values, 0.75);
  return s;
}

}  // namespace walkjump
