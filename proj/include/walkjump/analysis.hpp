#pragma once

#include <cstdint>
#include <vector>

#include "walkjump/smoothing.hpp"

namespace walkjump {

struct SpectrumReport {
  std::vector<double> eigenvalues;  // ascending
  double kappa = 1.0;
  int degenerate_count = 0;         // copies of 1/sigma^2
};

struct BoundReport {
  double value = 0.0;
  double derivative = 0.0;
  bool is_negative_definite_certified = false;
};

// Condition number of the sigma-smoothed Gaussian, (1 + tau_max^2/sigma^2) / (1 + tau_min^2/sigma^2).
double kappa_single(const AnisotropicGaussian& model, double sigma);

// Closed-form spectrum of the precision of p(y_{1:m}) in R^{md}.
SpectrumReport spectrum_aao(const AnisotropicGaussian& model, double sigma, int m);

// Precision of p(y_{1:m}) obtained by numerically inverting the joint
// covariance 11^T (x) C + sigma^2 I.  Refuses md > 5000.
Matrix assemble_aao_precision(const AnisotropicGaussian& model, double sigma, int m);

// Ascending eigenvalues of the assembled precision and their max abs
// distance to the closed form.
struct SpectrumValidation {
  std::vector<double> numeric;
  double max_abs_error = 0.0;
  double kappa_numeric = 0.0;
};
SpectrumValidation validate_spectrum_aao(const AnisotropicGaussian& model, double sigma, int m);

// Condition number of p(y_t | y_{1:t-1}) for the Gaussian model.
double kappa_oat(const AnisotropicGaussian& model, double sigma, int t);
// Diagonal of the precision of p(y_t | y_{1:t-1}).
Vector conditional_precision(const AnisotropicGaussian& model, double sigma, int t);

// Upper bound on the conditional Hessian after m measurements for X = Z + N(0, tau^2 I), |Z| <= R.
BoundReport zeta(double m, double sigma, double tau, double R);
double zeta_value(double m, double sigma, double tau, double R);
double zeta_derivative(double m, double sigma, double tau, double R);
// Same in terms of sigma^2, tau^2 and R^2, so that rational inputs stay exact.
BoundReport zeta_from_squares(double m, double sigma2, double tau2, double R2);

// Scalar c with hess log p(y) <= c I for f with hess f <= L I and
// |grad f(x)| >= mu |x - x0| - Delta.
double lemma1_bound(double L, double mu_growth, double Delta, ConstRef x0, ConstRef y, double sigma);

// sigma^2 d / m + 2 d L (sigma^2 / m)^2.
double w2_upper_bound(double L, double sigma, int m, Eigen::Index d);

// E|x_hat - X|^2 under the coupling Y_t = X + sigma N_t with X ~ p.
struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t n = 0;
};
MonteCarloEstimate coupled_jump_mse(const TargetModel& model, double sigma, int m, std::size_t n,
                                    Rng& rng);

// n jump outputs from exactly sampled measurements: X ~ p, m noisy copies, Bayes jump.
SampleMatrix sample_jump_distribution(const TargetModel& model, const SmoothingConfig& config,
                                      std::size_t n, Rng& rng);

// Monte Carlo over (X, Y_1, ..., Y_m) of the conditional Hessians
// -I/sigma^2 + cov(X | y_{1:t}) / sigma^4 for t = 1..m.  Every path is reused
// for all t, so trace differences carry their own standard errors.
struct HessianChainReport {
  std::vector<Matrix> expected_hessian;     // t = 1..m
  std::vector<double> trace;
  std::vector<double> trace_se;
  std::vector<double> trace_diff;           // trace[t+1] - trace[t]
  std::vector<double> trace_diff_se;
  std::vector<double> pathwise_violation_rate;  // fraction of paths with tr H_{t+1} > tr H_t
  bool nonincreasing_within(double n_se) const;
};
HessianChainReport expected_hessian_chain(const TargetModel& model, double sigma, int m,
                                          std::size_t n_mc, Rng& rng);
// Gaussian closed form, no sampling.
std::vector<Matrix> expected_hessian_chain_exact(const AnisotropicGaussian& model, double sigma, int m);

// Negative conditional Hessian of the 1-d mixture over a grid of running means and m.
struct LandscapePoint {
  int m = 1;
  double mean = 0.0;
  double negative_hessian = 0.0;
};
std::vector<LandscapePoint> hessian_landscape(const GaussianMixtureTwo& model, double sigma,
                                              const std::vector<double>& means,
                                              const std::vector<int>& ms);

// max over the running mean of the largest conditional Hessian eigenvalue,
// found by a grid scan refined with Brent's method.
struct HessianMaximum {
  double value = 0.0;
  Vector argmax;
};
HessianMaximum max_conditional_hessian(const GaussianMixtureTwo& model, double sigma, int m);

}  // namespace walkjump
