#include "walkjump/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace walkjump::harness {

namespace {

std::string type_name(const json& j) { return j.type_name(); }

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number, got " + type_name(j));
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

long as_long(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<long>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::floor(v) == v && std::abs(v) < 9e15) return static_cast<long>(v);
  }
  fail(path, "expected an integer, got " + type_name(j));
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string, got " + type_name(j));
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean, got " + type_name(j));
  return j.get<bool>();
}

std::vector<double> as_doubles(const json& j, const std::string& path) {
  if (j.is_number()) return {as_double(j, path)};
  if (!j.is_array()) fail(path, "expected a number or an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_double(j[i], path + "/" + std::to_string(i)));
  return out;
}

std::vector<int> as_ints(const json& j, const std::string& path) {
  if (j.is_number()) return {static_cast<int>(as_long(j, path))};
  if (!j.is_array()) fail(path, "expected an integer or an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(static_cast<int>(as_long(j[i], path + "/" + std::to_string(i))));
  return out;
}

// Object view that rejects keys outside `allowed`.
class Section {
 public:
  Section(const json& j, std::string path, std::set<std::string> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_.empty() ? "/" : path_, "expected an object, got " + type_name(j));
    for (const auto& [key, value] : j.items()) {
      (void)value;
      if (!allowed.count(key)) fail(path_ + "/" + key, "unknown key");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& at(const std::string& key) const { return j_.at(key); }
  std::string path(const std::string& key) const { return path_ + "/" + key; }

  template <class F>
  auto opt(const std::string& key, F convert) const -> std::optional<decltype(convert(json{}, std::string{}))> {
    if (!has(key)) return std::nullopt;
    return convert(at(key), path(key));
  }

 private:
  const json& j_;
  std::string path_;
};

void require(bool ok, const std::string& path, const std::string& msg) {
  if (!ok) fail(path, msg);
}

ModelSpec parse_model(const json& j, const std::string& path) {
  Section s(j, path, {"type", "d", "tau2", "tau2_narrow", "tau2_wide", "alpha", "mu_scale", "tau"});
  ModelSpec m;
  if (auto v = s.opt("type", as_string)) m.type = *v;
  require(m.type == "gaussian" || m.type == "mixture", s.path("type"), "must be 'gaussian' or 'mixture'");
  if (auto v = s.opt("d", as_long)) m.d = static_cast<int>(*v);
  if (auto v = s.opt("tau2", as_doubles)) m.tau2 = *v;
  if (auto v = s.opt("tau2_narrow", as_double)) m.tau2_narrow = *v;
  if (auto v = s.opt("tau2_wide", as_double)) m.tau2_wide = *v;
  if (auto v = s.opt("alpha", as_double)) m.alpha = *v;
  if (auto v = s.opt("mu_scale", as_double)) m.mu_scale = *v;
  if (auto v = s.opt("tau", as_double)) m.tau = *v;
  require(m.d >= 1, s.path("d"), "must be >= 1");
  require(m.alpha > 0.0 && m.alpha < 1.0, s.path("alpha"), "must lie in (0, 1)");
  require(m.tau > 0.0, s.path("tau"), "must be positive");
  require(m.tau2_narrow > 0.0 && m.tau2_wide > 0.0, path, "variances must be positive");
  return m;
}

KernelKind kernel_kind(const json& j, const std::string& path) {
  try {
    return kernel_kind_from_string(as_string(j, path));
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
}

Scheme scheme_kind(const json& j, const std::string& path) {
  try {
    return scheme_from_string(as_string(j, path));
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
}

ScoreMode score_kind(const json& j, const std::string& path) {
  try {
    return score_mode_from_string(as_string(j, path));
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
}

std::optional<double> parse_L(const json& j, const std::string& path) {
  if (j.is_string()) {
    require(j.get<std::string>() == "auto", path, "expected a number or \"auto\"");
    return std::nullopt;
  }
  const double v = as_double(j, path);
  require(v > 0.0, path, "must be positive");
  return v;
}

SchemeSpec parse_scheme(const json& j, const std::string& path) {
  if (j.is_string()) {
    SchemeSpec s;
    s.scheme = scheme_kind(j, path);
    s.label = j.get<std::string>();
    return s;
  }
  Section s(j, path, {"label", "scheme", "kernel", "score", "L", "sigma", "d", "delta", "gamma_delta", "m", "n_mc"});
  require(s.has("scheme"), path, "missing key 'scheme'");
  SchemeSpec out;
  out.scheme = scheme_kind(s.at("scheme"), s.path("scheme"));
  out.label = s.opt("label", as_string).value_or(to_string(out.scheme));
  out.kernel = s.opt("kernel", kernel_kind);
  out.score = s.opt("score", score_kind);
  if (s.has("L")) out.L = parse_L(s.at("L"), s.path("L"));
  out.sigma = s.opt("sigma", as_doubles);
  out.delta = s.opt("delta", as_doubles);
  out.gamma_delta = s.opt("gamma_delta", as_doubles);
  out.d = s.opt("d", as_ints);
  out.m = s.opt("m", as_ints);
  out.n_mc = s.opt("n_mc", as_ints);
  return out;
}

std::vector<std::uint64_t> parse_seeds(const json& j, const std::string& path) {
  std::vector<std::uint64_t> out;
  if (j.is_object()) {
    Section s(j, path, {"first", "count"});
    const long first = s.opt("first", as_long).value_or(0);
    const long count = s.opt("count", as_long).value_or(1);
    require(first >= 0 && count >= 0, path, "first and count must be >= 0");
    for (long i = 0; i < count; ++i) out.push_back(static_cast<std::uint64_t>(first + i));
    return out;
  }
  if (!j.is_array()) fail(path, "expected an array of seeds or {first, count}");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const long v = as_long(j[i], path + "/" + std::to_string(i));
    require(v >= 0, path + "/" + std::to_string(i), "seeds must be >= 0");
    out.push_back(static_cast<std::uint64_t>(v));
  }
  return out;
}

json init_to_json(const InitSpec& init) {
  if (init.kind == InitKind::FixedPoint)
    return {{"kind", "fixed"}, {"point", std::vector<double>(init.point.data(), init.point.data() + init.point.size())}};
  return {{"kind", "cold"}, {"box", {init.box_lo, init.box_hi}}};
}

json to_json(const ExperimentConfig& c) {
  json schemes = json::array();
  for (const auto& s : c.schemes) {
    json e = {{"label", s.label}, {"scheme", to_string(s.scheme)}};
    if (s.kernel) e["kernel"] = to_string(*s.kernel);
    if (s.score) e["score"] = to_string(*s.score);
    if (s.L) e["L"] = *s.L;
    if (s.sigma) e["sigma"] = *s.sigma;
    if (s.d) e["d"] = *s.d;
    if (s.delta) e["delta"] = *s.delta;
    if (s.gamma_delta) e["gamma_delta"] = *s.gamma_delta;
    if (s.m) e["m"] = *s.m;
    if (s.n_mc) e["n_mc"] = *s.n_mc;
    schemes.push_back(e);
  }
  json model = {{"type", c.model.type}, {"d", c.model.d}};
  if (c.model.type == "gaussian") {
    if (!c.model.tau2.empty()) model["tau2"] = c.model.tau2;
    model["tau2_narrow"] = c.model.tau2_narrow;
    model["tau2_wide"] = c.model.tau2_wide;
  } else {
    model["alpha"] = c.model.alpha;
    model["mu_scale"] = c.model.mu_scale;
    model["tau"] = c.model.tau;
  }
  json sampler = {{"n_walkers", c.n_walkers},
                  {"init", init_to_json(c.init)},
                  {"trajectory_stride", c.trajectory_stride},
                  {"checkpoints", c.checkpoints},
                  {"write_samples", c.write_samples}};
  if (c.budget) sampler["budget"] = *c.budget;
  if (c.n_t) sampler["n_t"] = *c.n_t;
  json out = {{"name", c.name},
              {"description", c.description},
              {"model", model},
              {"schemes", schemes},
              {"kernel", {{"kind", to_string(c.kernel)}}},
              {"score", {{"mode", to_string(c.score)}}},
              {"sampler", sampler},
              {"seeds", c.seeds},
              {"grid", {{"sigma", c.grid.sigma}, {"d", c.grid.d}, {"delta", c.grid.delta},
                        {"gamma_delta", c.grid.gamma_delta}, {"m", c.grid.m}, {"n_mc", c.grid.n_mc}}},
              {"output", c.output}};
  out["kernel"]["L"] = c.L ? json(*c.L) : json("auto");
  if (c.theta) out["metric"] = {{"theta", *c.theta}};
  return out;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  Section top(j, "", {"name", "description", "model", "schemes", "kernel", "smoothing", "sampler",
                      "score", "metric", "seeds", "grid", "output"});
  ExperimentConfig c;
  if (auto v = top.opt("name", as_string)) c.name = *v;
  if (auto v = top.opt("description", as_string)) c.description = *v;
  if (top.has("model")) c.model = parse_model(top.at("model"), "/model");

  double sigma = 1.0, delta = 0.03, gamma_delta = 0.05;
  int m = 1000, n_mc = 500;

  if (top.has("kernel")) {
    Section s(top.at("kernel"), "/kernel", {"kind", "delta", "gamma_delta", "L"});
    if (s.has("kind")) c.kernel = kernel_kind(s.at("kind"), s.path("kind"));
    if (auto v = s.opt("delta", as_double)) delta = *v;
    if (auto v = s.opt("gamma_delta", as_double)) gamma_delta = *v;
    if (s.has("L")) c.L = parse_L(s.at("L"), s.path("L"));
  }
  if (top.has("smoothing")) {
    Section s(top.at("smoothing"), "/smoothing", {"sigma", "m"});
    if (auto v = s.opt("sigma", as_double)) sigma = *v;
    if (auto v = s.opt("m", as_long)) m = static_cast<int>(*v);
  }
  if (top.has("score")) {
    Section s(top.at("score"), "/score", {"mode", "n_mc"});
    if (s.has("mode")) c.score = score_kind(s.at("mode"), s.path("mode"));
    if (auto v = s.opt("n_mc", as_long)) n_mc = static_cast<int>(*v);
  }
  if (top.has("sampler")) {
    Section s(top.at("sampler"), "/sampler",
              {"n_walkers", "budget", "n_t", "init", "trajectory_stride", "checkpoints", "write_samples"});
    if (auto v = s.opt("n_walkers", as_long)) c.n_walkers = static_cast<int>(*v);
    c.budget = s.opt("budget", as_long);
    c.n_t = s.opt("n_t", as_long);
    if (auto v = s.opt("trajectory_stride", as_long)) c.trajectory_stride = *v;
    if (auto v = s.opt("checkpoints", as_ints)) c.checkpoints = *v;
    if (auto v = s.opt("write_samples", as_bool)) c.write_samples = *v;
    if (s.has("init")) {
      Section i(s.at("init"), "/sampler/init", {"kind", "box", "point"});
      const std::string kind = i.opt("kind", as_string).value_or("cold");
      if (kind == "cold") {
        c.init.kind = InitKind::ColdUniform;
        if (auto box = i.opt("box", as_doubles)) {
          require(box->size() == 2 && (*box)[0] <= (*box)[1], i.path("box"), "expected [lo, hi] with lo <= hi");
          c.init.box_lo = (*box)[0];
          c.init.box_hi = (*box)[1];
        }
        require(!i.has("point"), i.path("point"), "only valid for kind 'fixed'");
      } else if (kind == "fixed") {
        c.init.kind = InitKind::FixedPoint;
        require(i.has("point"), "/sampler/init", "kind 'fixed' needs 'point'");
        const auto p = as_doubles(i.at("point"), i.path("point"));
        c.init.point = Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
        require(!i.has("box"), i.path("box"), "only valid for kind 'cold'");
      } else {
        fail(i.path("kind"), "must be 'cold' or 'fixed'");
      }
    }
    require(c.n_walkers >= 1, s.path("n_walkers"), "must be >= 1");
    require(!c.budget || *c.budget >= 1, s.path("budget"), "must be >= 1");
    require(!c.n_t || *c.n_t >= 1, s.path("n_t"), "must be >= 1");
    require(c.trajectory_stride >= 0, s.path("trajectory_stride"), "must be >= 0");
  }
  if (top.has("metric")) {
    Section s(top.at("metric"), "/metric", {"theta"});
    c.theta = s.opt("theta", as_doubles);
  }
  if (top.has("seeds")) c.seeds = parse_seeds(top.at("seeds"), "/seeds");
  if (auto v = top.opt("output", as_string)) c.output = *v;

  c.grid.sigma = {sigma};
  c.grid.d = {c.model.d};
  c.grid.delta = {delta};
  c.grid.gamma_delta = {gamma_delta};
  c.grid.m = {m};
  c.grid.n_mc = {n_mc};
  if (top.has("grid")) {
    Section s(top.at("grid"), "/grid", {"sigma", "d", "delta", "gamma_delta", "m", "n_mc"});
    if (auto v = s.opt("sigma", as_doubles)) c.grid.sigma = *v;
    if (auto v = s.opt("d", as_ints)) c.grid.d = *v;
    if (auto v = s.opt("delta", as_doubles)) c.grid.delta = *v;
    if (auto v = s.opt("gamma_delta", as_doubles)) c.grid.gamma_delta = *v;
    if (auto v = s.opt("m", as_ints)) c.grid.m = *v;
    if (auto v = s.opt("n_mc", as_ints)) c.grid.n_mc = *v;
  }

  if (top.has("schemes")) {
    const json& s = top.at("schemes");
    if (!s.is_array()) fail("/schemes", "expected an array");
    for (std::size_t i = 0; i < s.size(); ++i)
      c.schemes.push_back(parse_scheme(s[i], "/schemes/" + std::to_string(i)));
  } else {
    SchemeSpec oat;
    oat.label = "oat";
    c.schemes.push_back(oat);
  }
  c.resolved = to_json(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

TargetModel build_model(const ModelSpec& spec, int d) {
  if (spec.type == "gaussian") {
    Vector tau2(d);
    if (!spec.tau2.empty()) {
      if (static_cast<int>(spec.tau2.size()) != d)
        throw ConfigError("/model/tau2: length " + std::to_string(spec.tau2.size()) +
                          " does not match d = " + std::to_string(d));
      for (int i = 0; i < d; ++i) tau2[i] = spec.tau2[static_cast<std::size_t>(i)];
    } else {
      tau2.setConstant(spec.tau2_wide);
      tau2[0] = spec.tau2_narrow;
    }
    return AnisotropicGaussian(tau2);
  }
  return GaussianMixtureTwo(Vector::Constant(d, spec.mu_scale), spec.tau * spec.tau, spec.alpha);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

double auto_L(const ExperimentConfig& cfg, const TargetModel& model, Scheme scheme, double sigma) {
  if (scheme != Scheme::Direct) return 1.0 / (sigma * sigma);
  if (const auto* g = std::get_if<AnisotropicGaussian>(&model)) return 1.0 / g->tau2_min();
  (void)cfg;
  return 1.0 / std::get<GaussianMixtureTwo>(model).tau2;
}

}  // namespace

std::vector<Cell> expand_cells(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  std::set<std::string> seen;
  const GridSpec& g = cfg.grid;
  if (g.sigma.empty() || g.d.empty() || g.delta.empty() || g.gamma_delta.empty() || g.m.empty() ||
      g.n_mc.empty())
    return cells;
  for (const auto& s : cfg.schemes) {
    const bool direct = s.scheme == Scheme::Direct;
    const KernelKind kind = s.kernel.value_or(cfg.kernel);
    const ScoreMode score = s.score.value_or(cfg.score);
    const std::vector<double> sigmas = direct ? std::vector<double>{0.0} : s.sigma.value_or(cfg.grid.sigma);
    const std::vector<int> ms = direct ? std::vector<int>{1} : s.m.value_or(cfg.grid.m);
    const std::vector<int> n_mcs =
        (direct || score == ScoreMode::Analytic) ? std::vector<int>{0} : s.n_mc.value_or(cfg.grid.n_mc);
    const auto& ds = s.d ? *s.d : cfg.grid.d;
    const auto& deltas = s.delta ? *s.delta : cfg.grid.delta;
    const auto& gds = s.gamma_delta ? *s.gamma_delta : cfg.grid.gamma_delta;

    for (int d : ds)
      for (double sigma : sigmas)
        for (int m : ms)
          for (double delta : deltas)
            for (double gd : gds)
              for (int n_mc : n_mcs) {
                if (d < 1) throw ConfigError("/grid/d: dimensions must be >= 1");
                if (!direct && (sigma <= 0.0 || m < 1))
                  throw ConfigError("/grid: sigma must be > 0 and m >= 1 for smoothed schemes");
                const TargetModel model = build_model(cfg.model, d);
                Cell c;
                c.label = s.label;
                c.d = d;
                c.sigma = sigma;
                c.m = m;
                c.delta = delta;
                c.gamma_delta = gd;
                c.n_mc = n_mc;
                SamplerConfig& sc = c.sampler;
                sc.scheme = s.scheme;
                sc.smoothing.sigma = direct ? 1.0 : sigma;
                sc.smoothing.m = m;
                const double L = s.L ? *s.L : cfg.L ? *cfg.L : auto_L(cfg, model, s.scheme, sigma);
                sc.kernel = KernelParams::from_gamma_delta(kind, delta, gd, L);
                sc.n_walkers = cfg.n_walkers;
                sc.init = cfg.init;
                sc.score.mode = direct ? ScoreMode::Analytic : score;
                sc.score.n_mc = n_mc > 0 ? n_mc : 1;
                sc.trajectory_stride = cfg.trajectory_stride;
                if (s.scheme == Scheme::Oat)
                  for (int t : cfg.checkpoints)
                    if (t >= 1 && t <= m) sc.checkpoints.push_back(t);
                const long evals = kind == KernelKind::UldShenLee ? 2 : 1;
                const long default_m = cfg.grid.m.empty() ? 1 : cfg.grid.m.front();
                c.budget = cfg.budget ? *cfg.budget : cfg.n_t.value_or(1000) * (direct ? default_m : m);
                const long per_step = s.scheme == Scheme::Oat ? evals * m : evals;
                sc.n_t = std::max(1L, c.budget / per_step);
                if (sc.init.kind == InitKind::FixedPoint && sc.init.point.size() != d)
                  throw ConfigError("/sampler/init/point: length does not match d = " + std::to_string(d));

                json key = {{"label", c.label}, {"scheme", to_string(sc.scheme)}, {"kernel", to_string(kind)},
                            {"score", to_string(sc.score.mode)}, {"d", d}, {"sigma", sigma}, {"m", m},
                            {"delta", delta}, {"gamma_delta", gd}, {"n_mc", n_mc}, {"L", L},
                            {"n_t", sc.n_t}, {"n_walkers", sc.n_walkers}, {"init", init_to_json(sc.init)},
                            {"model", cfg.resolved["model"]}};
                c.key = key.dump();
                if (!seen.insert(c.key).second) continue;
                c.index = static_cast<int>(cells.size());
                cells.push_back(std::move(c));
              }
  }
  return cells;
}

}  // namespace walkjump::harness
