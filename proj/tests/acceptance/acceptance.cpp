// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                 run everything
//   acceptance --only NAME     run one criterion
//   acceptance --list          list criterion names

#include <CLI11.hpp>
#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"
#include "walkjump/analysis.hpp"
#include "walkjump/harness/config.hpp"
#include "walkjump/harness/presets.hpp"
#include "walkjump/harness/runner.hpp"
#include "walkjump/metrics.hpp"
#include "walkjump/samplers.hpp"

using namespace walkjump;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string join(const std::vector<double>& xs, const char* f = "%.4g") {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + fmt(f, xs[i]);
  return out + "]";
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

// Mixture used by the sampling experiments: alpha = 1/5, mu = 3 * 1_d, tau = 1.
GaussianMixtureTwo experiment_mixture(int d, double alpha = 0.2) {
  return GaussianMixtureTwo(Vector::Constant(d, 3.0), 1.0, alpha);
}

// Defaults shared by every sampling criterion.
constexpr double kDelta = 0.03;
constexpr double kGammaDelta = 0.05;

SamplerConfig oat_config(double sigma, int m, long n_t, int walkers) {
  SamplerConfig c;
  c.scheme = Scheme::Oat;
  c.smoothing = SmoothingConfig(sigma, m);
  c.kernel = KernelParams::from_gamma_delta(KernelKind::UldSachs, kDelta, kGammaDelta, 1.0 / (sigma * sigma));
  c.n_t = n_t;
  c.n_walkers = walkers;
  return c;
}

SamplerConfig direct_config(const GaussianMixtureTwo& gmm, long n_t, int walkers) {
  SamplerConfig c;
  c.scheme = Scheme::Direct;
  // Lipschitz constant of grad f for the mixture is 1 / tau^2
  c.kernel = KernelParams::from_gamma_delta(KernelKind::UldSachs, kDelta, kGammaDelta, 1.0 / gmm.tau2);
  c.n_t = n_t;
  c.n_walkers = walkers;
  return c;
}

struct RunStats {
  double w2 = 0.0;
  double minor = 0.0;
};

RunStats evaluate(const GaussianMixtureTwo& gmm, const SamplerConfig& cfg, std::uint64_t seed) {
  const TargetModel model = gmm;
  const SamplerResult r = run_sampler(model, cfg, derive_seed(seed, {static_cast<std::uint64_t>(cfg.scheme), 17}));
  Rng ref_rng(derive_seed(seed, {0x72656600, static_cast<std::uint64_t>(gmm.dim())}));
  const SampleMatrix ref = sample_exact(model, r.samples.rows(), ref_rng);
  return {sliced_w2(r.samples, ref, default_theta(model)), minor_mode_fraction(gmm, r.samples)};
}

// sigma from {1, 2, 4} with the lowest median W2 on held-out seeds.
double tune_sigma(const GaussianMixtureTwo& gmm, int m, long n_t, std::string& log) {
  const std::vector<std::uint64_t> held_out{1000, 1001};
  double best_sigma = 1.0, best = INFINITY;
  for (double sigma : {1.0, 2.0, 4.0}) {
    std::vector<double> w2;
    for (auto s : held_out) w2.push_back(evaluate(gmm, oat_config(sigma, m, n_t, 50), s).w2);
    const double med = median(w2);
    log += "sigma=" + fmt("%g", sigma) + ":" + fmt("%.3f", med) + " ";
    if (med < best) {
      best = med;
      best_sigma = sigma;
    }
  }
  return best_sigma;
}

// ---------------------------------------------------------------------------

Outcome spectrum() {
  const Vector tau2 = vec({0.1, 0.5, 1.0});
  const AnisotropicGaussian g(tau2);
  const int d = 3, m = 5;
  const double sigma = 1.0;
  // independent assembly: covariance of (y_1..y_m) is 11^T (x) C + sigma^2 I
  Matrix cov = Matrix::Zero(d * m, d * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int i = 0; i < d; ++i) cov(a * d + i, b * d + i) = tau2[i] + (a == b ? sigma * sigma : 0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(cov.inverse()));
  const SpectrumReport rep = spectrum_aao(g, sigma, m);
  double err = 0.0;
  for (int i = 0; i < d * m; ++i) err = std::max(err, std::abs(rep.eigenvalues[i] - es.eigenvalues()[i]));
  const double kappa_want = 1.0 + m * tau2.maxCoeff() / (sigma * sigma);
  const bool ok = err <= 1e-10 && rep.kappa == kappa_want && rep.degenerate_count == (m - 1) * d;
  return {ok, "max|eig err|=" + fmt("%.3g", err) + " kappa=" + fmt("%.17g", rep.kappa) + " want " +
                  fmt("%.17g", kappa_want) + " degenerate=" + std::to_string(rep.degenerate_count)};
}

Outcome monotonic_chain() {
  const Vector tau2 = vec({0.1, 1.0});
  const AnisotropicGaussian g(tau2);
  bool ok = true;
  double worst_oracle = 0.0;
  std::string detail;
  for (double sigma : {1.0, 2.0, 4.0}) {
    const double s2 = sigma * sigma;
    double prev = INFINITY, min_gap = INFINITY;
    for (int t = 1; t <= 1000; ++t) {
      const double k = kappa_oat(g, sigma, t);
      // conditional variance of y_t: sigma^2 + tau^2 sigma^2 / ((t - 1) tau^2 + sigma^2)
      auto var = [&](double v) { return s2 + v * s2 / ((t - 1) * v + s2); };
      worst_oracle = std::max(worst_oracle, std::abs(k - var(1.0) / var(0.1)) / k);
      ok = ok && k > 1.0 && k < prev;
      min_gap = std::min(min_gap, prev - k);
      prev = k;
    }
    detail += "sigma=" + fmt("%g", sigma) + " kappa_1000-1=" + fmt("%.3g", prev - 1.0) + " min step=" + fmt("%.3g", min_gap) + "; ";
  }
  ok = ok && worst_oracle <= 1e-12;
  return {ok, detail + "oracle rel err=" + fmt("%.2g", worst_oracle)};
}

Outcome hessian_fd() {
  const double sigma = 2.0;
  const oracle::Density1d p{oracle::Density1d::Mixture, 1.0, 3.0, 0.5};
  const GaussianMixtureTwo gmm(vec({3.0}), 1.0, 0.5);
  Rng rng(2024);
  bool ok = true;
  std::string detail;
  for (int m : {1, 4, 16}) {
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const double x = rng.normal() + (rng.uniform() < p.alpha ? p.mu : -p.mu);
      std::vector<double> ys(static_cast<std::size_t>(m));
      for (auto& y : ys) y = x + sigma * rng.normal();
      auto log_p = [&](double yt) {
        std::vector<double> z = ys;
        z.back() = yt;
        return oracle::log_joint(p, z, sigma);
      };
      // Richardson-extrapolated central second difference
      const double h = 0.02, yt = ys.back();
      const double d1 = oracle::second_derivative_fd(log_p, yt, h);
      const double d2 = oracle::second_derivative_fd(log_p, yt, h / 2);
      const double fd = (4.0 * d2 - d1) / 3.0;
      MeasurementAccumulator acc(1);
      for (double y : ys) acc.push(Vector::Constant(1, y));
      const double got = hessian_conditional(gmm, acc, SmoothingConfig(sigma, m))(0, 0);
      worst = std::max(worst, oracle::relative_error(got, fd));
    }
    ok = ok && worst <= 1e-5;
    detail += "m=" + std::to_string(m) + " max rel err=" + fmt("%.3g", worst) + "; ";
  }
  return {ok, detail};
}

Outcome zeta_tightness() {
  const oracle::Density1d p{oracle::Density1d::Mixture, 1.0, 3.0, 0.5};
  bool ok = true;
  double worst_max = 0.0, worst_quad = 0.0;
  for (double sigma : {2.0, 2.0 * std::sqrt(2.0)}) {
    const GaussianMixtureTwo gmm(vec({3.0}), 1.0, 0.5);
    for (int m = 1; m <= 64; ++m) {
      const double z = zeta_value(m, sigma, 1.0, 3.0);
      const HessianMaximum mx = max_conditional_hessian(gmm, sigma, m);
      worst_max = std::max(worst_max, std::abs(mx.value - z));
      // value at ybar = 0 from quadrature of the posterior variance
      const std::vector<double> ys(static_cast<std::size_t>(m), 0.0);
      const double var = oracle::posterior_moments(p, ys, sigma).second;
      worst_quad = std::max(worst_quad, std::abs(-1.0 / (sigma * sigma) + var / std::pow(sigma, 4) - z));
    }
  }
  ok = worst_max <= 1e-8 && worst_quad <= 1e-8;
  const BoundReport boundary = zeta_from_squares(1.0, 8.0, 1.0, 9.0);
  ok = ok && boundary.value == 0.0;
  bool derivative_ok = true;
  for (double tau : {0.25, 1.0, 3.0})
    for (double sigma : {0.5, 2.0, 5.0})
      for (double R : {0.0, 1.0, 3.0})
        for (double m = 1.0; m <= 200.0; m *= 1.1) derivative_ok = derivative_ok && zeta_derivative(m, sigma, tau, R) <= 0.0;
  ok = ok && derivative_ok;
  return {ok, "max|argmax - zeta|=" + fmt("%.3g", worst_max) + " max|quadrature - zeta|=" + fmt("%.3g", worst_quad) +
                  " zeta(1; 8,1,9)=" + fmt("%.17g", boundary.value) + " derivative<=0: " + (derivative_ok ? "yes" : "no")};
}

Outcome universality() {
  const AnisotropicGaussian g(vec({0.1, 1.0}));
  const TargetModel model = g;
  const double s = 0.5;
  const std::size_t n = 100000;
  bool ok = true;
  std::string detail;
  for (int m : {4, 16}) {
    Rng a(derive_seed(7, {static_cast<std::uint64_t>(m), 1})), b(derive_seed(7, {static_cast<std::uint64_t>(m), 2}));
    const SampleMatrix many = sample_jump_distribution(model, SmoothingConfig(s * std::sqrt(double(m)), m), n, a);
    const SampleMatrix one = sample_jump_distribution(model, SmoothingConfig(s, 1), n, b);
    const double w_narrow = sliced_w2(many, one, default_theta(model));
    const double w_diag = sliced_w2(many, one, normalized(Vector::Ones(2)));
    ok = ok && w_narrow <= 0.05 && w_diag <= 0.05;
    detail += "m=" + std::to_string(m) + " W2=" + fmt("%.4f", w_narrow) + "/" + fmt("%.4f", w_diag) + "; ";
  }
  return {ok, detail};
}

Outcome w2_bound() {
  const AnisotropicGaussian g(vec({0.1, 1.0}));
  const TargetModel model = g;
  const double L = 1.0 / g.tau2_min();
  bool ok = true;
  std::string detail;
  Rng rng(99);
  for (double sigma : {0.5, 1.0, 2.0}) {
    for (int m : {1, 10}) {
      const auto est = coupled_jump_mse(model, sigma, m, 1000000, rng);
      const double bound = w2_upper_bound(L, sigma, m, 2);
      const double margin = bound - est.mean;
      // strictly positive even after three standard errors
      ok = ok && margin - 3.0 * est.standard_error > 0.0;
      detail += "(" + fmt("%g", sigma) + "," + std::to_string(m) + ") margin=" + fmt("%.4g", margin) + "+-" +
                fmt("%.1g", est.standard_error) + "; ";
    }
  }
  return {ok, detail};
}

struct IsoNormal {
  void score(const Vector& x, Vector& out) const { out = -x; }
  double log_density(const Vector& x) const { return -0.5 * x.squaredNorm(); }
};

Outcome kernel_stationarity() {
  // 16 independent chains of 10^6 steps each, pooled, started in equilibrium
  const int chains = 16;
  const long steps = 1000000;
  bool ok = true;
  std::string detail;
  for (KernelKind kind : {KernelKind::Mala, KernelKind::UldSachs, KernelKind::UldCheng, KernelKind::UldShenLee}) {
    const LangevinKernel kernel(KernelParams::from_gamma_delta(kind, 0.01, 0.05, 1.0));
    IsoNormal target;
    Vector sum = Vector::Zero(2), sum2 = Vector::Zero(2);
    std::uint64_t evals = 0;
    for (int c = 0; c < chains; ++c) {
      Rng init(derive_seed(5, {static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(c), 0}));
      KernelState s(init.normal_vector(2), Rng::derived(5, {static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(c), 1}));
      s.velocity = init.normal_vector(2);
      for (long i = 0; i < steps; ++i) {
        kernel.step(s, target);
        sum += s.position;
        sum2 += s.position.cwiseAbs2();
      }
      evals += s.score_evals;
    }
    const double n = static_cast<double>(chains) * steps;
    const Vector var = sum2 / n - (sum / n).cwiseAbs2();
    const double tol = kind == KernelKind::Mala ? 0.02 : 0.05;
    const double err = (var.array() - 1.0).abs().maxCoeff();
    bool kind_ok = err <= tol;
    if (kind == KernelKind::UldShenLee) kind_ok = kind_ok && evals == 2u * chains * steps;
    ok = ok && kind_ok;
    detail += to_string(kind) + " var=" + join({var[0], var[1]}) + " evals/step=" + fmt("%.6g", evals / n) + "; ";
  }
  return {ok, detail};
}

Outcome gmm_ordering() {
  const int walkers = 100, m = 1000;
  const long n_t = 1000, budget = m * n_t;
  bool ok = true;
  std::string detail;
  for (int d : {2, 4, 8}) {
    const GaussianMixtureTwo gmm = experiment_mixture(d);
    std::string tune_log;
    const double sigma = tune_sigma(gmm, m, n_t, tune_log);
    std::vector<double> oat, direct;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      oat.push_back(evaluate(gmm, oat_config(sigma, m, n_t, walkers), seed).w2);
      direct.push_back(evaluate(gmm, direct_config(gmm, budget, walkers), seed).w2);
    }
    const double mo = median(oat), md = median(direct);
    ok = ok && mo < md;
    detail += "d=" + std::to_string(d) + " [" + tune_log + "-> " + fmt("%g", sigma) + "] OAT median W2=" +
              fmt("%.3f", mo) + " " + join(oat, "%.2f") + " DIRECT=" + fmt("%.3f", md) + " " + join(direct, "%.2f") + "; ";
  }
  return {ok, detail};
}

Outcome minor_mode_mass() {
  const int m = 1000;
  const long n_t = 1000;
  bool ok = true;
  std::string detail;
  for (int d : {2, 8}) {
    const GaussianMixtureTwo gmm = experiment_mixture(d);
    std::string tune_log;
    const double sigma = tune_sigma(gmm, m, n_t, tune_log);
    const RunStats s = evaluate(gmm, oat_config(sigma, m, n_t, 1000), 0);
    ok = ok && std::abs(s.minor - 0.2) <= 0.05;
    detail += "d=" + std::to_string(d) + " sigma=" + fmt("%g", sigma) + " minor fraction=" + fmt("%.3f", s.minor) + "; ";
  }
  return {ok, detail};
}

Outcome tunneling() {
  using namespace walkjump::harness;
  const ExperimentConfig cfg = parse_config(preset_config("tunneling"));
  const auto cells = expand_cells(cfg);
  bool ok = true;
  bool saw_oat = false, saw_direct = false;
  std::string detail;
  for (const auto& cell : cells) {
    const CellRun run = run_cell(cfg, cell, cfg.seeds.front(), true);
    // walkers whose jump estimate entered the minor basin at any recorded step
    const auto& gmm = std::get<GaussianMixtureTwo>(build_model(cfg.model, cell.d));
    std::vector<char> visited(static_cast<std::size_t>(cfg.n_walkers), 0);
    for (const auto& row : run.result.trajectory)
      if (gmm.minor_sign() * row.jump_projection > 0.0) visited[static_cast<std::size_t>(row.walker)] = 1;
    const double visit = std::count(visited.begin(), visited.end(), 1) / static_cast<double>(cfg.n_walkers);
    const double minor = run.record.minor_mode_fraction;
    if (cell.label == "oat") {
      saw_oat = true;
      ok = ok && minor >= 0.1;
    } else if (cell.sampler.scheme == Scheme::Direct) {
      saw_direct = true;
      ok = ok && minor <= 0.01;
    }
    detail += cell.label + "(m=" + std::to_string(cell.m) + ", n_t=" + std::to_string(cell.sampler.n_t) +
              ") final minor=" + fmt("%.2f", minor) + " visited=" + fmt("%.2f", visit) + "; ";
  }
  return {ok && saw_oat && saw_direct, detail};
}

Outcome plugin_convergence() {
  const GaussianMixtureTwo gmm = experiment_mixture(2);
  const TargetModel model = gmm;
  const double sigma = 2.0;
  const std::vector<int> ns{500, 1000, 2000, 4000};
  Rng rng(31);
  const SampleMatrix xs = sample_exact(model, 200, rng);
  std::vector<std::vector<double>> err(ns.size());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const Vector y = xs.row(i).transpose() + sigma * rng.normal_vector(2);
    const Vector exact = score_smoothed(model, y, sigma);
    for (std::size_t k = 0; k < ns.size(); ++k) {
      const PlugInConfig cfg{ns[k], derive_seed(31, {static_cast<std::uint64_t>(i), k})};
      err[k].push_back((estimate_score(model, y, sigma, cfg) - exact).norm());
    }
  }
  bool ok = true;
  std::vector<double> medians, pvalues;
  for (std::size_t k = 0; k < ns.size(); ++k) medians.push_back(median(err[k]));
  for (std::size_t k = 0; k + 1 < ns.size(); ++k) {
    int wins = 0;
    for (std::size_t i = 0; i < err[k].size(); ++i) wins += err[k + 1][i] < err[k][i];
    // one-sided sign test: P(Bin(200, 1/2) >= wins)
    const boost::math::binomial_distribution<double> b(static_cast<double>(err[k].size()), 0.5);
    const double pv = wins == 0 ? 1.0 : boost::math::cdf(boost::math::complement(b, wins - 1.0));
    pvalues.push_back(pv);
    ok = ok && medians[k + 1] < medians[k] && pv < 0.05;
  }

  // OAT with n = 500 against the analytic score
  const int m = 100, walkers = 100;
  const long n_t = 200;
  std::vector<double> w_analytic, w_plugin;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SamplerConfig c = oat_config(sigma, m, n_t, walkers);
    w_analytic.push_back(evaluate(gmm, c, seed).w2);
    c.score = {ScoreMode::PlugIn, 500};
    w_plugin.push_back(evaluate(gmm, c, seed).w2);
  }
  const double ma = median(w_analytic), mp = median(w_plugin);
  ok = ok && mp <= 2.0 * ma;
  return {ok, "median |g_hat - g| " + join(medians) + " sign-test p " + join(pvalues, "%.2g") +
                  "; OAT median W2 analytic=" + fmt("%.3f", ma) + " plugin(500)=" + fmt("%.3f", mp)};
}

Outcome trace_monotonicity() {
  const TargetModel model = GaussianMixtureTwo(vec({3.0}), 1.0, 0.5);
  Rng rng(77);
  const HessianChainReport rep = expected_hessian_chain(model, 4.0, 10, 100000, rng);
  double worst = -INFINITY;
  for (std::size_t t = 0; t < rep.trace_diff.size(); ++t)
    worst = std::max(worst, rep.trace_diff[t] / rep.trace_diff_se[t]);
  const bool ok = rep.nonincreasing_within(3.0);
  return {ok, "traces " + join(rep.trace, "%.5f") + " max diff/se=" + fmt("%.2f", worst)};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"spectrum", spectrum},
      {"monotonic_chain", monotonic_chain},
      {"hessian_fd", hessian_fd},
      {"zeta_tightness", zeta_tightness},
      {"universality", universality},
      {"w2_bound", w2_bound},
      {"kernel_stationarity", kernel_stationarity},
      {"gmm_ordering", gmm_ordering},
      {"minor_mode_mass", minor_mode_mass},
      {"tunneling", tunneling},
      {"plugin_convergence", plugin_convergence},
      {"trace_monotonicity", trace_monotonicity},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string only;
  bool list = false;
  app.add_option("--only", only, "run a single criterion");
  app.add_flag("--list", list, "list criteria");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& c : criteria()) std::cout << c.name << '\n';
    return 0;
  }
  int failures = 0, ran = 0;
  for (const auto& c : criteria()) {
    if (!only.empty() && c.name != only) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << " (" << fmt("%.1f", secs) << " s)"
              << std::endl;
    failures += o.pass ? 0 : 1;
  }
  if (ran == 0) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
