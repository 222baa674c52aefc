#pragma once

#include <utility>
#include <vector>

#include "walkjump/target_models.hpp"

namespace walkjump {

struct SlicedW2Config {
  Vector theta;  // unit projection direction
};

// 1-d W2 between the projections of two equally sized sample sets on theta,
// coupled by sorting: sqrt(mean_i (x_(i) - y_(i))^2).
double sliced_w2(const SampleMatrix& xs, const SampleMatrix& ys, const SlicedW2Config& cfg);
double sliced_w2(const SampleMatrix& xs, const SampleMatrix& ys, ConstRef theta);
double w2_sorted(std::vector<double> a, std::vector<double> b);

// Shuffle the larger set and truncate it to the size of the smaller one.
std::pair<SampleMatrix, SampleMatrix> equalize_counts(const SampleMatrix& xs,
                                                      const SampleMatrix& ys, Rng& rng);

// Anisotropic Gaussian: basis vector of the narrowest dimension.
// Mixture: mu / |mu|.  Generic: its declared direction.
Vector default_theta(const TargetModel& model);

Vector normalized(ConstRef theta);

struct Summary {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  std::size_t n = 0;
};
// Linear-interpolated quantiles.
Summary summarize(std::vector<double> values);
double quantile(std::vector<double> values, double q);

}  // namespace walkjump
