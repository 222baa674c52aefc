#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "walkjump/rng.hpp"
#include "walkjump/types.hpp"

namespace walkjump {

using ConstRef = const Eigen::Ref<const Vector>&;

// N(0, diag(variances)).  Energy: f(x) = 1/2 sum x_i^2 / tau_i^2 (normalizer dropped).
struct AnisotropicGaussian {
  Vector variances;

  explicit AnisotropicGaussian(Vector tau2);
  Eigen::Index dim() const { return variances.size(); }
  double tau2_min() const { return variances.minCoeff(); }
  double tau2_max() const { return variances.maxCoeff(); }
  double condition_number() const { return tau2_max() / tau2_min(); }
};

// alpha N(mu, tau2 I) + (1 - alpha) N(-mu, tau2 I).
// Energy: f(x) = -log(alpha e^{-|x-mu|^2/2tau2} + (1-alpha) e^{-|x+mu|^2/2tau2}),
// i.e. the Gaussian normalizer (2 pi tau2)^{d/2} is dropped and the weights kept.
struct GaussianMixtureTwo {
  Vector mu;
  double tau2;
  double alpha;
  double log_alpha;      // log(alpha)
  double log_1m_alpha;   // log(1 - alpha)

  GaussianMixtureTwo(Vector mu, double tau2, double alpha);
  Eigen::Index dim() const { return mu.size(); }
  double radius2() const { return mu.squaredNorm(); }
  // +1 when the +mu component carries the smaller weight, -1 otherwise.
  double minor_sign() const { return alpha <= 0.5 ? 1.0 : -1.0; }
};

// User supplied energy.  Only plug-in score estimation applies to it.
struct GenericEnergy {
  Eigen::Index dimension = 0;
  std::function<double(const Vector&)> f;
  std::function<Vector(const Vector&)> grad_f;
  std::optional<Vector> direction;  // projection direction for the metric
  std::string name = "generic";
};

using TargetModel = std::variant<AnisotropicGaussian, GaussianMixtureTwo, GenericEnergy>;

Eigen::Index dim(const TargetModel& model);
std::string model_name(const TargetModel& model);
bool has_closed_form_smoothing(const TargetModel& model);

double energy(const TargetModel& model, ConstRef x);
Vector grad_energy(const TargetModel& model, ConstRef x);
void grad_energy_into(const TargetModel& model, ConstRef x, Eigen::Ref<Vector> out);

// n i.i.d. draws, one per row.  Throws UnsupportedModel for generic energies.
SampleMatrix sample_exact(const TargetModel& model, Eigen::Index n, Rng& rng);

// Stable log(e^a + e^b).
double log_add_exp(double a, double b);

// Posterior weight of the +mu component given a point y observed with
// isotropic variance `var` around the component centre: sigmoid(logit(alpha) + 2 mu.y / var).
double plus_responsibility(const GaussianMixtureTwo& gmm, ConstRef y, double var);

}  // namespace walkjump
