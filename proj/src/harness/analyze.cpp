#include "walkjump/harness/analyze.hpp"

#include <cmath>

#include "walkjump/analysis.hpp"

namespace walkjump::harness {

namespace {

AnisotropicGaussian gaussian(const AnalyzeArgs& a) {
  return AnisotropicGaussian(Eigen::Map<const Vector>(a.tau2.data(), static_cast<Eigen::Index>(a.tau2.size())));
}

double sigma_of(const AnalyzeArgs& a) {
  if (a.sigma) return *a.sigma;
  if (a.sigma2) return std::sqrt(*a.sigma2);
  return 1.0;
}

double sigma2_of(const AnalyzeArgs& a) {
  if (a.sigma2) return *a.sigma2;
  const double s = sigma_of(a);
  return s * s;
}

Vector vec(const std::vector<double>& v, int d) {
  if (v.empty()) return Vector::Zero(d);
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> default_means() {
  std::vector<double> out;
  for (int i = 0; i <= 200; ++i) out.push_back(-10.0 + 0.1 * i);
  return out;
}

}  // namespace

std::vector<std::string> analyze_quantities() {
  return {"kappa-single", "kappa-oat", "spectrum-aao", "zeta", "zeta-curve", "lemma1",
          "w2-bound", "expected-hessian", "hessian-landscape", "hessian-max"};
}

json analyze(const std::string& q, const AnalyzeArgs& a) {
  json out = {{"quantity", q}};
  if (q == "kappa-single") {
    const double s = sigma_of(a);
    out["inputs"] = {{"tau2", a.tau2}, {"sigma", s}};
    out["value"] = kappa_single(gaussian(a), s);
    out["valid"] = out["value"].get<double>() >= 1.0;
    return out;
  }
  if (q == "kappa-oat") {
    const double s = sigma_of(a);
    const auto g = gaussian(a);
    out["inputs"] = {{"tau2", a.tau2}, {"sigma", s}, {"t", a.t}};
    out["value"] = kappa_oat(g, s, a.t);
    if (a.validate) {
      bool ok = true;
      double prev = kappa_oat(g, s, 1);
      for (int t = 2; t <= a.t_max; ++t) {
        const double k = kappa_oat(g, s, t);
        ok = ok && k < prev && k > 1.0;
        prev = k;
      }
      out["strictly_decreasing_to_t_max"] = ok;
      out["t_max"] = a.t_max;
    }
    out["valid"] = out["value"].get<double>() >= 1.0;
    return out;
  }
  if (q == "spectrum-aao") {
    const double s = sigma_of(a);
    const auto g = gaussian(a);
    const SpectrumReport r = spectrum_aao(g, s, a.m);
    out["inputs"] = {{"tau2", a.tau2}, {"sigma", s}, {"m", a.m}};
    out["kappa"] = r.kappa;
    out["degenerate_count"] = r.degenerate_count;
    out["eigenvalues"] = r.eigenvalues;
    if (a.validate) {
      const SpectrumValidation v = validate_spectrum_aao(g, s, a.m);
      out["validation"] = {{"max_abs_error", v.max_abs_error},
                           {"kappa_numeric", v.kappa_numeric},
                           {"passed", v.max_abs_error <= 1e-10}};
    }
    out["valid"] = true;
    return out;
  }
  if (q == "zeta") {
    const double s2 = sigma2_of(a);
    const BoundReport b = zeta_from_squares(a.m, s2, a.tau * a.tau, a.R * a.R);
    out["inputs"] = {{"sigma2", s2}, {"tau", a.tau}, {"R", a.R}, {"m", a.m}};
    out["value"] = b.value;
    out["derivative"] = b.derivative;
    out["certified_log_concave"] = b.is_negative_definite_certified;
    out["boundary"] = b.value == 0.0;
    out["valid"] = a.tau == 0.0 || b.derivative <= 0.0;
    return out;
  }
  if (q == "zeta-curve") {
    const double s2 = sigma2_of(a);
    json rows = json::array();
    for (int m = 1; m <= a.m_max; ++m) {
      const BoundReport b = zeta_from_squares(m, s2, a.tau * a.tau, a.R * a.R);
      rows.push_back({{"m", m}, {"sigma2_zeta", s2 * b.value}, {"negated", -s2 * b.value},
                      {"asymptote", 1.0 - 1.0 / m}});
    }
    out["inputs"] = {{"sigma2", s2}, {"tau", a.tau}, {"R", a.R}, {"m_max", a.m_max}};
    out["rows"] = rows;
    out["valid"] = true;
    return out;
  }
  if (q == "lemma1") {
    const double s = sigma_of(a);
    const Vector y = vec(a.y, a.d);
    const Vector x0 = a.x0.empty() ? Vector::Zero(y.size()) : vec(a.x0, a.d);
    out["inputs"] = {{"L", a.L}, {"mu", a.mu_growth}, {"Delta", a.Delta}, {"sigma", s}};
    out["value"] = lemma1_bound(a.L, a.mu_growth, a.Delta, x0, y, s);
    out["certified_log_concave"] = out["value"].get<double>() < 0.0;
    out["valid"] = true;
    return out;
  }
  if (q == "w2-bound") {
    const double s = sigma_of(a);
    out["inputs"] = {{"L", a.L}, {"sigma", s}, {"m", a.m}, {"d", a.d}};
    out["value"] = w2_upper_bound(a.L, s, a.m, a.d);
    if (a.validate) {
      const auto g = gaussian(a);
      Rng rng(a.seed);
      const double L = 1.0 / g.tau2_min();
      const MonteCarloEstimate e = coupled_jump_mse(g, s, a.m, static_cast<std::size_t>(a.n_mc), rng);
      const double bound = w2_upper_bound(L, s, a.m, g.dim());
      out["validation"] = {{"tau2", a.tau2}, {"L", L}, {"bound", bound}, {"coupled_mse", e.mean},
                           {"standard_error", e.standard_error}, {"passed", e.mean < bound}};
    }
    out["valid"] = true;
    return out;
  }
  if (q == "expected-hessian") {
    const double s = sigma_of(a);
    Rng rng(a.seed);
    const TargetModel model = GaussianMixtureTwo(Vector::Constant(a.d, a.mu), a.tau * a.tau, a.alpha);
    const HessianChainReport r = expected_hessian_chain(model, s, a.m, static_cast<std::size_t>(a.n_mc), rng);
    json rows = json::array();
    for (std::size_t t = 0; t < r.trace.size(); ++t) {
      json row = {{"t", t + 1}, {"trace", r.trace[t]}, {"trace_se", r.trace_se[t]},
                  {"expected_hessian", matrix_json(r.expected_hessian[t])}};
      if (t + 1 < r.trace.size()) {
        row["diff_to_next"] = r.trace_diff[t];
        row["diff_se"] = r.trace_diff_se[t];
        row["pathwise_violation_rate"] = r.pathwise_violation_rate[t];
      }
      rows.push_back(row);
    }
    out["inputs"] = {{"sigma", s}, {"m", a.m}, {"mu", a.mu}, {"tau", a.tau}, {"alpha", a.alpha},
                     {"d", a.d}, {"n_mc", a.n_mc}, {"seed", a.seed}};
    out["rows"] = rows;
    out["valid"] = r.nonincreasing_within(3.0);
    return out;
  }
  if (q == "hessian-landscape") {
    const double s = sigma_of(a);
    const GaussianMixtureTwo model(Vector::Constant(1, a.mu), a.tau * a.tau, a.alpha);
    const std::vector<int> ms = a.ms.empty() ? std::vector<int>{1, 2, 4, 8, 16, 32, 64} : a.ms;
    json rows = json::array();
    for (const auto& p : hessian_landscape(model, s, a.means.empty() ? default_means() : a.means, ms))
      rows.push_back({{"m", p.m}, {"mean", p.mean}, {"negative_hessian", p.negative_hessian}});
    out["inputs"] = {{"sigma", s}, {"mu", a.mu}, {"tau", a.tau}, {"alpha", a.alpha}};
    out["rows"] = rows;
    out["valid"] = true;
    return out;
  }
  if (q == "hessian-max") {
    const double s = sigma_of(a);
    const GaussianMixtureTwo model(Vector::Constant(a.d, a.mu), a.tau * a.tau, a.alpha);
    const HessianMaximum h = max_conditional_hessian(model, s, a.m);
    const double z = zeta_value(a.m, s, a.tau, model.mu.norm());
    out["inputs"] = {{"sigma", s}, {"m", a.m}, {"mu", a.mu}, {"tau", a.tau}, {"alpha", a.alpha}, {"d", a.d}};
    out["max_eigenvalue"] = h.value;
    out["argmax"] = std::vector<double>(h.argmax.data(), h.argmax.data() + h.argmax.size());
    out["zeta"] = z;
    out["abs_gap"] = std::abs(h.value - z);
    out["valid"] = h.value <= z + 1e-8;
    return out;
  }
  throw ConfigError("unknown quantity '" + q + "'");
}

}  // namespace walkjump::harness
