#include "walkjump/analysis.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>

namespace walkjump {

namespace {

void require_positive(const char* what, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(std::string(what) + " must be positive");
}

}  // namespace

double kappa_single(const AnisotropicGaussian& model, double sigma) {
  require_positive("kappa_single: sigma", sigma);
  const double s2 = sigma * sigma;
  return (1.0 + model.tau2_max() / s2) / (1.0 + model.tau2_min() / s2);
}

SpectrumReport spectrum_aao(const AnisotropicGaussian& model, double sigma, int m) {
  require_positive("spectrum_aao: sigma", sigma);
  if (m < 2) throw Error("spectrum_aao: m must be >= 2 (use kappa_single for m = 1)");
  const double s2 = sigma * sigma;
  const Eigen::Index d = model.dim();
  SpectrumReport r;
  r.eigenvalues.assign(static_cast<std::size_t>((m - 1) * d), 1.0 / s2);
  for (Eigen::Index i = 0; i < d; ++i)
    r.eigenvalues.push_back(1.0 / (m * model.variances[i] + s2));
  std::sort(r.eigenvalues.begin(), r.eigenvalues.end());
  r.degenerate_count = static_cast<int>((m - 1) * d);
  r.kappa = 1.0 + m * model.tau2_max() / s2;
  return r;
}

Matrix assemble_aao_precision(const AnisotropicGaussian& model, double sigma, int m) {
  const Eigen::Index d = model.dim();
  const Eigen::Index n = d * m;
  if (n > 5000) throw Error("assemble_aao_precision: md > 5000, dense path disabled");
  Matrix cov(n, n);
  const Matrix c = model.variances.asDiagonal();
  for (int s = 0; s < m; ++s)
    for (int t = 0; t < m; ++t) cov.block(s * d, t * d, d, d) = c;
  cov.diagonal().array() += sigma * sigma;
  Matrix prec = cov.llt().solve(Matrix::Identity(n, n));
  return 0.5 * (prec + prec.transpose());
}

SpectrumValidation validate_spectrum_aao(const AnisotropicGaussian& model, double sigma, int m) {
  const SpectrumReport closed = spectrum_aao(model, sigma, m);
  const Matrix prec = assemble_aao_precision(model, sigma, m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(prec, Eigen::EigenvaluesOnly);
  SpectrumValidation v;
  v.numeric.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(v.numeric.begin(), v.numeric.end());
  for (std::size_t i = 0; i < v.numeric.size(); ++i)
    v.max_abs_error = std::max(v.max_abs_error, std::abs(v.numeric[i] - closed.eigenvalues[i]));
  v.kappa_numeric = v.numeric.back() / v.numeric.front();
  return v;
}

Vector conditional_precision(const AnisotropicGaussian& model, double sigma, int t) {
  require_positive("conditional_precision: sigma", sigma);
  if (t < 1) throw Error("conditional_precision: t must be >= 1");
  const double s2 = sigma * sigma;
  const Eigen::ArrayXd v = model.variances.array();
  return ((1.0 - 1.0 / t) / s2 + 1.0 / (t * (t * v + s2))).matrix();
}

double kappa_oat(const AnisotropicGaussian& model, double sigma, int t) {
  if (t < 1) throw Error("kappa_oat: t must be >= 1");
  if (t == 1) return kappa_single(model, sigma);
  const double s2 = sigma * sigma;
  const double a = t + s2 / model.tau2_min();
  const double b = t + s2 / model.tau2_max();
  return (1.0 - 1.0 / a) / (1.0 - 1.0 / b);
}

namespace {

double zeta_sq(double m, double s2, double t2, double r2) {
  const double q = m * t2 + s2;
  return (t2 * q - q * q + s2 * r2) / (s2 * q * q);
}

double zeta_sq_derivative(double m, double s2, double t2, double r2) {
  const double q = m * t2 + s2;
  return -t2 * (2.0 * r2 * s2 + s2 * t2 + m * t2 * t2) / (s2 * q * q * q);
}

}  // namespace

double zeta_value(double m, double sigma, double tau, double R) {
  return zeta_sq(m, sigma * sigma, tau * tau, R * R);
}

double zeta_derivative(double m, double sigma, double tau, double R) {
  return zeta_sq_derivative(m, sigma * sigma, tau * tau, R * R);
}

BoundReport zeta_from_squares(double m, double sigma2, double tau2, double R2) {
  require_positive("zeta: sigma^2", sigma2);
  require_positive("zeta: m", m);
  if (!(tau2 >= 0.0) || !(R2 >= 0.0)) throw Error("zeta: tau and R must be >= 0");
  BoundReport b;
  b.value = zeta_sq(m, sigma2, tau2, R2);
  b.derivative = zeta_sq_derivative(m, sigma2, tau2, R2);
  b.is_negative_definite_certified = b.value < 0.0;
  if (tau2 > 0.0 && b.derivative > 0.0) throw Error("zeta: derivative positive for tau > 0");
  return b;
}

BoundReport zeta(double m, double sigma, double tau, double R) {
  return zeta_from_squares(m, sigma * sigma, tau * tau, R * R);
}

double lemma1_bound(double L, double mu_growth, double Delta, ConstRef x0, ConstRef y, double sigma) {
  require_positive("lemma1_bound: mu", mu_growth);
  require_positive("lemma1_bound: sigma", sigma);
  if (x0.size() != y.size()) throw DimensionMismatch("lemma1_bound", x0.size(), y.size());
  const double s2 = sigma * sigma;
  const double mu2 = mu_growth * mu_growth;
  const double d = static_cast<double>(y.size());
  return (-1.0 + 3.0 * L * d / (mu2 * s2) + 3.0 * Delta * Delta / (mu2 * s2) +
          3.0 * (x0 - y).squaredNorm() / (mu2 * s2 * s2 * s2)) / s2;
}

double w2_upper_bound(double L, double sigma, int m, Eigen::Index d) {
  if (m < 1) throw Error("w2_upper_bound: m must be >= 1");
  const double v = sigma * sigma / m;
  return v * d + 2.0 * d * L * v * v;
}

namespace {

// X ~ p and the running mean of m noisy copies of X.
void draw_measurement_mean(const TargetModel& model, double sigma, int m, Rng& rng, Vector& x,
                           MeasurementAccumulator& acc, Vector& y) {
  x = sample_exact(model, 1, rng).row(0).transpose();
  acc = MeasurementAccumulator(x.size());
  for (int t = 0; t < m; ++t) {
    for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = x[i] + sigma * rng.normal();
    acc.push(y);
  }
}

}  // namespace

MonteCarloEstimate coupled_jump_mse(const TargetModel& model, double sigma, int m, std::size_t n,
                                    Rng& rng) {
  const SmoothingConfig cfg(sigma, m);
  const Eigen::Index d = dim(model);
  Vector x(d), y(d);
  MeasurementAccumulator acc(d);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    draw_measurement_mean(model, sigma, m, rng, x, acc, y);
    const double e = (bayes_jump(model, acc, cfg) - x).squaredNorm();
    sum += e;
    sum_sq += e * e;
  }
  MonteCarloEstimate r;
  r.n = n;
  r.mean = sum / static_cast<double>(n);
  const double var = std::max(sum_sq / static_cast<double>(n) - r.mean * r.mean, 0.0);
  r.standard_error = std::sqrt(var / static_cast<double>(n));
  return r;
}

SampleMatrix sample_jump_distribution(const TargetModel& model, const SmoothingConfig& config,
                                      std::size_t n, Rng& rng) {
  const Eigen::Index d = dim(model);
  SampleMatrix out(static_cast<Eigen::Index>(n), d);
  Vector x(d), y(d);
  MeasurementAccumulator acc(d);
  for (std::size_t i = 0; i < n; ++i) {
    draw_measurement_mean(model, config.sigma, config.m, rng, x, acc, y);
    out.row(static_cast<Eigen::Index>(i)) = bayes_jump(model, acc, config).transpose();
  }
  return out;
}

bool HessianChainReport::nonincreasing_within(double n_se) const {
  for (std::size_t i = 0; i < trace_diff.size(); ++i)
    if (trace_diff[i] > n_se * trace_diff_se[i]) return false;
  return true;
}

HessianChainReport expected_hessian_chain(const TargetModel& model, double sigma, int m,
                                          std::size_t n_mc, Rng& rng) {
  if (!has_closed_form_smoothing(model)) throw UnsupportedModel("expected_hessian_chain: analytic model required");
  if (m < 1 || n_mc < 2) throw Error("expected_hessian_chain: need m >= 1 and n_mc >= 2");
  const Eigen::Index d = dim(model);
  const double s2 = sigma * sigma;
  const auto mm = static_cast<std::size_t>(m);
  std::vector<Matrix> sum(mm, Matrix::Zero(d, d));
  std::vector<double> tr_sum(mm, 0.0), tr_sq(mm, 0.0);
  std::vector<double> diff_sum(mm > 0 ? mm - 1 : 0, 0.0), diff_sq(diff_sum.size(), 0.0);
  std::vector<std::size_t> violations(diff_sum.size(), 0);
  std::vector<double> tr(mm);
  MeasurementAccumulator acc(d);
  Vector x(d), y(d);

  for (std::size_t k = 0; k < n_mc; ++k) {
    x = sample_exact(model, 1, rng).row(0).transpose();
    acc = MeasurementAccumulator(d);
    for (std::size_t t = 0; t < mm; ++t) {
      for (Eigen::Index i = 0; i < d; ++i) y[i] = x[i] + sigma * rng.normal();
      acc.push(y);
      Matrix h = posterior_covariance(model, acc.mean(), SmoothingConfig(sigma, static_cast<int>(t + 1))) /
                 (s2 * s2);
      h.diagonal().array() -= 1.0 / s2;
      sum[t] += h;
      tr[t] = h.trace();
      tr_sum[t] += tr[t];
      tr_sq[t] += tr[t] * tr[t];
    }
    for (std::size_t t = 0; t + 1 < mm; ++t) {
      const double dlt = tr[t + 1] - tr[t];
      diff_sum[t] += dlt;
      diff_sq[t] += dlt * dlt;
      if (dlt > 0.0) ++violations[t];
    }
  }
  const double n = static_cast<double>(n_mc);
  auto se = [n](double s, double sq) {
    const double mean = s / n;
    return std::sqrt(std::max(sq / n - mean * mean, 0.0) / (n - 1.0));
  };
  HessianChainReport r;
  for (std::size_t t = 0; t < mm; ++t) {
    r.expected_hessian.push_back(sum[t] / n);
    r.trace.push_back(tr_sum[t] / n);
    r.trace_se.push_back(se(tr_sum[t], tr_sq[t]));
  }
  for (std::size_t t = 0; t < diff_sum.size(); ++t) {
    r.trace_diff.push_back(diff_sum[t] / n);
    r.trace_diff_se.push_back(se(diff_sum[t], diff_sq[t]));
    r.pathwise_violation_rate.push_back(static_cast<double>(violations[t]) / n);
  }
  return r;
}

std::vector<Matrix> expected_hessian_chain_exact(const AnisotropicGaussian& model, double sigma, int m) {
  std::vector<Matrix> out;
  const double s2 = sigma * sigma;
  for (int t = 1; t <= m; ++t) {
    const Eigen::ArrayXd v = model.variances.array();
    const double st2 = s2 / t;
    const Eigen::ArrayXd post = v * st2 / (v + st2);
    out.push_back((post / (s2 * s2) - 1.0 / s2).matrix().asDiagonal());
  }
  return out;
}

std::vector<LandscapePoint> hessian_landscape(const GaussianMixtureTwo& model, double sigma,
                                              const std::vector<double>& means,
                                              const std::vector<int>& ms) {
  if (model.dim() != 1) throw DimensionMismatch("hessian_landscape", 1, model.dim());
  const TargetModel tm = model;
  std::vector<LandscapePoint> out;
  out.reserve(means.size() * ms.size());
  Vector y(1);
  for (int m : ms) {
    const SmoothingConfig cfg(sigma, m);
    for (double mean : means) {
      y[0] = mean;
      out.push_back({m, mean, -hessian_conditional_from_mean(tm, y, cfg)(0, 0)});
    }
  }
  return out;
}

HessianMaximum max_conditional_hessian(const GaussianMixtureTwo& model, double sigma, int m) {
  const TargetModel tm = model;
  const SmoothingConfig cfg(sigma, m);
  const Vector dir = model.mu / model.mu.norm();
  auto top = [&](double s) {
    const Vector y = s * dir;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hessian_conditional_from_mean(tm, y, cfg),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
  };
  const double span = 4.0 * (model.mu.norm() + std::sqrt(model.tau2 + cfg.effective_variance()));
  const int grid = 2001;
  double best_s = -span, best = top(-span);
  for (int i = 1; i < grid; ++i) {
    const double s = -span + 2.0 * span * i / (grid - 1);
    const double v = top(s);
    if (v > best) {
      best = v;
      best_s = s;
    }
  }
  const double h = 2.0 * span / (grid - 1);
  const auto res = boost::math::tools::brent_find_minima([&](double s) { return -top(s); },
                                                         best_s - h, best_s + h, 52);
  HessianMaximum out;
  if (-res.second >= best) {
    out.value = -res.second;
    out.argmax = res.first * dir;
  } else {
    out.value = best;
    out.argmax = best_s * dir;
  }
  return out;
}

}  // namespace walkjump
