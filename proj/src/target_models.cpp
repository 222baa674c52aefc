#include "walkjump/target_models.hpp"

#include <cmath>
#include <limits>

namespace walkjump {

namespace {

void check_dim(const char* what, Eigen::Index expected, Eigen::Index got) {
  if (expected != got) throw DimensionMismatch(what, expected, got);
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

AnisotropicGaussian::AnisotropicGaussian(Vector tau2) : variances(std::move(tau2)) {
  if (variances.size() == 0) throw Error("AnisotropicGaussian: empty variance vector");
  for (Eigen::Index i = 0; i < variances.size(); ++i) {
    if (!(variances[i] > 0.0) || !std::isfinite(variances[i]))
      throw Error("AnisotropicGaussian: variances must be finite and positive");
  }
}

GaussianMixtureTwo::GaussianMixtureTwo(Vector mu_, double tau2_, double alpha_)
    : mu(std::move(mu_)), tau2(tau2_), alpha(alpha_) {
  if (mu.size() == 0) throw Error("GaussianMixtureTwo: empty mean vector");
  if (!mu.allFinite()) throw Error("GaussianMixtureTwo: mean must be finite");
  if (!(tau2 > 0.0) || !std::isfinite(tau2)) throw Error("GaussianMixtureTwo: tau2 must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("GaussianMixtureTwo: alpha must lie in (0, 1)");
  log_alpha = std::log(alpha);
  log_1m_alpha = std::log1p(-alpha);
}

Eigen::Index dim(const TargetModel& model) {
  return std::visit(
      [](const auto& m) -> Eigen::Index {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, GenericEnergy>)
          return m.dimension;
        else
          return m.dim();
      },
      model);
}

std::string model_name(const TargetModel& model) {
  struct {
    std::string operator()(const AnisotropicGaussian&) const { return "gaussian"; }
    std::string operator()(const GaussianMixtureTwo&) const { return "mixture"; }
    std::string operator()(const GenericEnergy& g) const { return g.name; }
  } visitor;
  return std::visit(visitor, model);
}

bool has_closed_form_smoothing(const TargetModel& model) {
  return !std::holds_alternative<GenericEnergy>(model);
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

double plus_responsibility(const GaussianMixtureTwo& gmm, ConstRef y, double var) {
  const double logit = gmm.log_alpha - gmm.log_1m_alpha + 2.0 * gmm.mu.dot(y) / var;
  return sigmoid(logit);
}

double energy(const TargetModel& model, ConstRef x) {
  check_dim("energy", dim(model), x.size());
  struct {
    ConstRef x;
    double operator()(const AnisotropicGaussian& g) const {
      return 0.5 * (x.array().square() / g.variances.array()).sum();
    }
    double operator()(const GaussianMixtureTwo& g) const {
      const double a = g.log_alpha - (x - g.mu).squaredNorm() / (2.0 * g.tau2);
      const double b = g.log_1m_alpha - (x + g.mu).squaredNorm() / (2.0 * g.tau2);
      return -log_add_exp(a, b);
    }
    double operator()(const GenericEnergy& g) const { return g.f(Vector(x)); }
  } visitor{x};
  return std::visit(visitor, model);
}

void grad_energy_into(const TargetModel& model, ConstRef x, Eigen::Ref<Vector> out) {
  check_dim("grad_energy", dim(model), x.size());
  check_dim("grad_energy output", dim(model), out.size());
  if (const auto* g = std::get_if<AnisotropicGaussian>(&model)) {
    out = x.cwiseQuotient(g->variances);
  } else if (const auto* g = std::get_if<GaussianMixtureTwo>(&model)) {
    const double r = plus_responsibility(*g, x, g->tau2);
    out = (x - (2.0 * r - 1.0) * g->mu) / g->tau2;
  } else {
    const auto& e = std::get<GenericEnergy>(model);
    if (!e.grad_f) throw UnsupportedModel("generic energy has no gradient callable");
    out = e.grad_f(Vector(x));
  }
}

Vector grad_energy(const TargetModel& model, ConstRef x) {
  Vector out(dim(model));
  grad_energy_into(model, x, out);
  return out;
}

SampleMatrix sample_exact(const TargetModel& model, Eigen::Index n, Rng& rng) {
  if (n < 0) throw Error("sample_exact: negative sample count");
  const Eigen::Index d = dim(model);
  SampleMatrix out(n, d);
  if (const auto* g = std::get_if<AnisotropicGaussian>(&model)) {
    const Vector sd = g->variances.cwiseSqrt();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < d; ++j) out(i, j) = sd[j] * rng.normal();
  } else if (const auto* m = std::get_if<GaussianMixtureTwo>(&model)) {
    const double tau = std::sqrt(m->tau2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sign = rng.uniform() < m->alpha ? 1.0 : -1.0;
      for (Eigen::Index j = 0; j < d; ++j) out(i, j) = sign * m->mu[j] + tau * rng.normal();
    }
  } else {
    throw UnsupportedModel("sample_exact: no exact sampler for generic energies");
  }
  return out;
}

}  // namespace walkjump
