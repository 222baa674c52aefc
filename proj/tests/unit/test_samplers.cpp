#include <doctest.h>

#include <tbb/global_control.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "walkjump/samplers.hpp"

using namespace walkjump;

namespace {

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

std::vector<double> column(const SampleMatrix& s, int c) {
  std::vector<double> out(static_cast<std::size_t>(s.rows()));
  for (Eigen::Index i = 0; i < s.rows(); ++i) out[static_cast<std::size_t>(i)] = s(i, c);
  return out;
}

SamplerConfig base_config(Scheme scheme, double sigma, int m, long n_t, int walkers) {
  SamplerConfig c;
  c.scheme = scheme;
  c.smoothing = SmoothingConfig(sigma, m);
  c.kernel = KernelParams::from_gamma_delta(KernelKind::UldSachs, 0.03, 0.05, 1.0 / (sigma * sigma));
  c.n_t = n_t;
  c.n_walkers = walkers;
  return c;
}

}  // namespace

TEST_CASE("scheme names") {
  for (auto s : {Scheme::Oat, Scheme::Aao, Scheme::M1, Scheme::Direct}) CHECK(scheme_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(scheme_from_string("gibbs"), ConfigError);
  CHECK(score_mode_from_string("plugin") == ScoreMode::PlugIn);
}

TEST_CASE("single-measurement schemes agree in distribution") {
  TargetModel model = AnisotropicGaussian(Vector::Constant(1, 1.0));
  const int n = 10000;
  const auto oat = run_oat(model, base_config(Scheme::Oat, 1.0, 1, 300, n), 1);
  const auto m1 = run_m1(model, base_config(Scheme::M1, 1.0, 1, 300, n), 2);
  const auto aao = run_aao(model, base_config(Scheme::Aao, 1.0, 1, 300, n), 3);
  CHECK(ks_two_sample(column(oat.samples, 0), column(m1.samples, 0)) <= 0.02);
  CHECK(ks_two_sample(column(oat.samples, 0), column(aao.samples, 0)) <= 0.02);
  CHECK(ks_two_sample(column(m1.samples, 0), column(aao.samples, 0)) <= 0.02);
}

TEST_CASE("OAT jump variance on a gaussian") {
  // Var E[X | ybar] = tau^4 / (tau^2 + sigma^2/m)
  Vector tau2(2);
  tau2 << 0.1, 1.0;
  TargetModel model = AnisotropicGaussian(tau2);
  const double sigma = 1.0;
  const int m = 20, n = 4000;
  const auto r = run_oat(model, base_config(Scheme::Oat, sigma, m, 300, n), 5);
  for (int i = 0; i < 2; ++i) {
    const double want = tau2[i] * tau2[i] / (tau2[i] + sigma * sigma / m);
    const double got = r.samples.col(i).array().square().mean();
    CHECK(got == doctest::Approx(want).epsilon(0.1));
  }
}

TEST_CASE("DIRECT stationary covariance on a gaussian") {
  Vector tau2(2);
  tau2 << 0.1, 1.0;
  TargetModel model = AnisotropicGaussian(tau2);
  SamplerConfig c;
  c.scheme = Scheme::Direct;
  c.kernel = KernelParams::from_gamma_delta(KernelKind::UldSachs, 0.03, 0.05, 10.0);
  c.n_t = 2000;
  c.n_walkers = 20000;
  const auto r = run_direct(model, c, 9);
  const Matrix cov = (r.samples.transpose() * r.samples) / static_cast<double>(r.samples.rows());
  for (int i = 0; i < 2; ++i) CHECK(cov(i, i) == doctest::Approx(tau2[i]).epsilon(0.05));
  CHECK(std::abs(cov(0, 1)) < 0.05 * std::sqrt(tau2[0] * tau2[1]));
}

TEST_CASE("results do not depend on the thread count") {
  TargetModel model = GaussianMixtureTwo(Vector::Constant(2, 3.0), 1.0, 0.2);
  auto cfg = base_config(Scheme::Oat, 1.0, 5, 50, 16);
  cfg.trajectory_stride = 7;
  SamplerResult one, many;
  {
    tbb::global_control gc(tbb::global_control::max_allowed_parallelism, 1);
    one = run_oat(model, cfg, 3);
  }
  {
    tbb::global_control gc(tbb::global_control::max_allowed_parallelism, 8);
    many = run_oat(model, cfg, 3);
  }
  CHECK(one.samples == many.samples);
  CHECK(one.trajectory.size() == many.trajectory.size());
  CHECK(one.grad_evals == many.grad_evals);
  const auto again = run_oat(model, cfg, 4);
  CHECK(again.samples != one.samples);
}

TEST_CASE("gradient accounting") {
  TargetModel model = GaussianMixtureTwo(Vector::Constant(2, 3.0), 1.0, 0.2);
  auto cfg = base_config(Scheme::Oat, 1.0, 7, 30, 5);
  CHECK(run_oat(model, cfg, 1).grad_evals == 5u * 7u * 30u);
  cfg.kernel.kind = KernelKind::UldShenLee;
  CHECK(run_oat(model, cfg, 1).grad_evals == 2u * 5u * 7u * 30u);
  auto direct = base_config(Scheme::Direct, 1.0, 1, 123, 4);
  CHECK(run_direct(model, direct, 1).grad_evals == 4u * 123u);
  auto aao = base_config(Scheme::Aao, 1.0, 6, 40, 3);
  CHECK(run_aao(model, aao, 1).grad_evals == 3u * 40u);
}

TEST_CASE("trajectory rows") {
  TargetModel model = GaussianMixtureTwo(Vector::Constant(2, 3.0), 1.0, 0.2);
  for (long stride : {1L, 7L, 1000L, 100000L}) {
    auto cfg = base_config(Scheme::Oat, 1.0, 4, 25, 3);
    cfg.trajectory_stride = stride;
    const auto r = run_oat(model, cfg, 2);
    const long total = cfg.total_steps();
    CHECK(r.trajectory.size() == static_cast<std::size_t>(3 * ((total + stride - 1) / stride)));
    // the last step of every walker is always present
    CHECK(r.trajectory.back().step == total - 1);
    CHECK(r.trajectory.back().t == 4);
  }
  auto off = base_config(Scheme::Direct, 1.0, 1, 50, 2);
  CHECK(run_direct(model, off, 1).trajectory.empty());
}

TEST_CASE("final checkpoint equals the final sample") {
  TargetModel model = GaussianMixtureTwo(Vector::Constant(2, 3.0), 1.0, 0.2);
  auto cfg = base_config(Scheme::Oat, 1.0, 6, 20, 4);
  cfg.checkpoints = {6, 2};
  const auto r = run_oat(model, cfg, 8);
  REQUIRE(r.checkpoint_t == std::vector<int>{2, 6});
  CHECK(r.checkpoint_samples[1] == r.samples);
}

TEST_CASE("fixed initialization") {
  TargetModel model = GaussianMixtureTwo(Vector::Constant(2, 3.0), 1.0, 0.2);
  auto cfg = base_config(Scheme::Direct, 1.0, 1, 1, 3);
  cfg.init.kind = InitKind::FixedPoint;
  cfg.init.point = Vector::Constant(2, 3.0);
  cfg.trajectory_stride = 1;
  const auto r = run_direct(model, cfg, 1);
  // one Sachs step from rest moves by at most a few delta
  CHECK((r.samples.rowwise() - cfg.init.point.transpose()).rowwise().norm().maxCoeff() < 0.1);
  cfg.init.point = Vector::Constant(3, 3.0);
  CHECK_THROWS_AS(run_direct(model, cfg, 1), DimensionMismatch);
}

TEST_CASE("plug-in scores drive OAT") {
  TargetModel model = GaussianMixtureTwo(Vector::Constant(2, 3.0), 1.0, 0.2);
  auto cfg = base_config(Scheme::Oat, 2.0, 3, 20, 4);
  cfg.score = {ScoreMode::PlugIn, 100};
  const auto r = run_oat(model, cfg, 1);
  CHECK(r.samples.allFinite());
  CHECK(run_oat(model, cfg, 1).samples == r.samples);
}

TEST_CASE("errors") {
  TargetModel gmm = GaussianMixtureTwo(Vector::Constant(2, 3.0), 1.0, 0.2);
  auto cfg = base_config(Scheme::Oat, 1.0, 3, 10, 2);
  cfg.checkpoints = {4};
  CHECK_THROWS_AS(run_oat(gmm, cfg, 1), ConfigError);
  cfg = base_config(Scheme::Oat, 1.0, 3, 0, 2);
  CHECK_THROWS_AS(run_oat(gmm, cfg, 1), ConfigError);

  GenericEnergy e;
  e.dimension = 1;
  e.f = [](const Vector& x) { return x.squaredNorm(); };
  e.grad_f = [](const Vector& x) { return Vector(2.0 * x); };
  CHECK_THROWS_AS(run_oat(e, base_config(Scheme::Oat, 1.0, 2, 10, 1), 1), UnsupportedModel);

  GenericEnergy broken = e;
  broken.grad_f = [](const Vector& x) { return Vector::Constant(x.size(), std::nan("")); };
  auto direct = base_config(Scheme::Direct, 1.0, 1, 10, 2);
  try {
    run_direct(broken, direct, 1);
    FAIL("expected KernelFailure");
  } catch (const KernelFailure& err) {
    CHECK(std::string(err.what()).find("walker") != std::string::npos);
  }
}

TEST_CASE("minor mode fraction") {
  GaussianMixtureTwo gmm(Vector::Constant(2, 3.0), 1.0, 0.2);
  SampleMatrix s(4, 2);
  s << 3, 3, -3, -3, 1, 0, -1, -0.5;
  CHECK(minor_mode_fraction(gmm, s) == doctest::Approx(0.5));
  GaussianMixtureTwo flipped(Vector::Constant(2, 3.0), 1.0, 0.8);
  s.row(1) << 3, 3;
  CHECK(minor_mode_fraction(flipped, s) == doctest::Approx(0.25));
}
