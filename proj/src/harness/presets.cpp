#include "walkjump/harness/presets.hpp"

namespace walkjump::harness {

const std::vector<double>& delta_search_grid() {
  static const std::vector<double> grid{1e-4, 3e-4, 1e-3, 3e-3, 1e-2};
  return grid;
}

const std::vector<double>& gamma_delta_search_grid() {
  static const std::vector<double> grid{0.0125, 0.025, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6};
  return grid;
}

namespace {

json tuned_kernel() {
  return {{"kind", "uld_sachs"}, {"delta", 0.03}, {"gamma_delta", 0.05}, {"L", "auto"}};
}

json elliptical_model() {
  return {{"type", "gaussian"}, {"d", 2}, {"tau2_narrow", 0.1}, {"tau2_wide", 1.0}};
}

json mixture_model(double alpha) {
  return {{"type", "mixture"}, {"d", 2}, {"alpha", alpha}, {"mu_scale", 3.0}, {"tau", 1.0}};
}

json base(const std::string& name, const std::string& description, json model) {
  return {{"name", name},
          {"description", description},
          {"model", std::move(model)},
          {"kernel", tuned_kernel()},
          {"smoothing", {{"sigma", 1.0}, {"m", 1000}}},
          {"score", {{"mode", "analytic"}, {"n_mc", 500}}},
          {"sampler", {{"n_walkers", 100}, {"budget", 1000000}, {"init", {{"kind", "cold"}, {"box", {-1.0, 1.0}}}}}},
          {"seeds", {{"first", 0}, {"count", 10}}},
          {"output", "results/" + name}};
}

json scheme_comparison() {
  return json::array({
      {{"label", "oat"}, {"scheme", "oat"}, {"m", 1000}},
      {{"label", "m1"}, {"scheme", "m1"}, {"m", 1}},
      {{"label", "aao"}, {"scheme", "aao"}, {"m", {200, 400, 600, 800, 1000}}},
      {{"label", "sigma0"}, {"scheme", "direct"}},
  });
}

}  // namespace

std::vector<PresetInfo> list_presets() {
  return {
      {"elliptical_vs_dim", "W2 vs d on the elliptical Gaussian for OAT, m=1, AAO and sigma=0"},
      {"elliptical_vs_sigma", "W2 vs sigma on the elliptical Gaussian, OAT against sigma=0"},
      {"gmm_vs_dim", "W2 vs d on the two-Gaussian mixture for OAT, m=1, AAO and sigma=0"},
      {"gmm_vs_sigma", "W2 vs sigma on the two-Gaussian mixture, OAT against sigma=0"},
      {"tunneling", "Walkers started at the dominant mode (3,3); trajectories and final samples"},
      {"kernel_zoo", "OAT with MALA and three underdamped kernels on the d=8 mixture, W2 vs m"},
      {"score_n_sweep", "OAT with plug-in scores for n in {500..4000} against the analytic score"},
  };
}

json preset_config(const std::string& name) {
  if (name == "elliptical_vs_dim") {
    json c = base(name, "W2 vs d, elliptical Gaussian", elliptical_model());
    c["schemes"] = scheme_comparison();
    c["grid"] = {{"d", {2, 4, 8, 16, 32}}, {"sigma", {1.0}}};
    return c;
  }
  if (name == "elliptical_vs_sigma") {
    json c = base(name, "W2 vs sigma, elliptical Gaussian", elliptical_model());
    c["schemes"] = json::array({{{"label", "oat"}, {"scheme", "oat"}}, {{"label", "sigma0"}, {"scheme", "direct"}}});
    c["grid"] = {{"d", {2, 8, 32}}, {"sigma", {0.5, 1.0, 2.0, 4.0}}};
    return c;
  }
  if (name == "gmm_vs_dim") {
    json c = base(name, "W2 vs d, mixture alpha=1/5, mu=3*1_d, tau=1", mixture_model(0.2));
    c["schemes"] = scheme_comparison();
    c["grid"] = {{"d", {2, 4, 8, 16}}, {"sigma", {1.0, 2.0, 4.0}}};
    return c;
  }
  if (name == "gmm_vs_sigma") {
    json c = base(name, "W2 vs sigma, mixture alpha=1/5, mu=3*1_d, tau=1", mixture_model(0.2));
    c["schemes"] = json::array({{{"label", "oat"}, {"scheme", "oat"}}, {{"label", "sigma0"}, {"scheme", "direct"}}});
    c["grid"] = {{"d", {2, 4, 8, 16}}, {"sigma", {0.5, 1.0, 2.0, 4.0, 8.0}}};
    return c;
  }
  if (name == "tunneling") {
    // weight 4/5 on +mu makes (3,3) the dominant mode
    json c = base(name, "100K total kernel steps from (3,3); OAT read both as m*n_t = 100 * 1000 and 1000 * 100",
                  mixture_model(0.8));
    c["smoothing"] = {{"sigma", 2.0}, {"m", 100}};
    c["sampler"] = {{"n_walkers", 100},
                    {"budget", 100000},
                    {"init", {{"kind", "fixed"}, {"point", {3.0, 3.0}}}},
                    {"trajectory_stride", 100},
                    {"write_samples", true}};
    c["schemes"] = json::array({
        {{"label", "oat"}, {"scheme", "oat"}, {"m", 100}},
        {{"label", "oat_m1000"}, {"scheme", "oat"}, {"m", 1000}},
        {{"label", "sigma0"}, {"scheme", "direct"}},
    });
    c["seeds"] = {0};
    return c;
  }
  if (name == "kernel_zoo") {
    json c = base(name, "OAT on the d=8 mixture with each kernel; equal score-evaluation budgets",
                  mixture_model(0.2));
    c["model"]["d"] = 8;
    c["smoothing"] = {{"sigma", 2.0}, {"m", 1000}};
    c["sampler"]["checkpoints"] = {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
    c["schemes"] = json::array({
        {{"label", "mala"}, {"scheme", "oat"}, {"kernel", "mala"}},
        {{"label", "cheng"}, {"scheme", "oat"}, {"kernel", "uld_cheng"}},
        {{"label", "shenlee"}, {"scheme", "oat"}, {"kernel", "uld_shenlee"}},
        {{"label", "sachs"}, {"scheme", "oat"}, {"kernel", "uld_sachs"}},
    });
    return c;
  }
  if (name == "score_n_sweep") {
    json c = base(name, "OAT with plug-in scores on the mixture, d in {2, 8}", mixture_model(0.2));
    c["smoothing"] = {{"sigma", 2.0}, {"m", 1000}};
    c["sampler"]["checkpoints"] = {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
    c["schemes"] = json::array({
        {{"label", "analytic"}, {"scheme", "oat"}, {"score", "analytic"}},
        {{"label", "plugin"}, {"scheme", "oat"}, {"score", "plugin"}, {"n_mc", {500, 1000, 2000, 4000}}},
    });
    c["grid"] = {{"d", {2, 8}}};
    return c;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace walkjump::harness
