#include "walkjump/harness/runner.hpp"

#include <tbb/parallel_for.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include "walkjump/metrics.hpp"

namespace walkjump::harness {

namespace fs = std::filesystem;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string results_header() {
  return "schema_version,experiment,cell,label,scheme,model,d,sigma,m,kernel,delta,gamma_delta,L,"
         "score_mode,n_mc,n_t,budget,n_walkers,seed,w2,minor_mode_fraction,acceptance_rate,"
         "grad_evals,wall_ms,status";
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

std::string join_row(const Eigen::Ref<const Vector>& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += format_number(v[i]);
  }
  return out;
}

Vector theta_for(const ExperimentConfig& cfg, const TargetModel& model) {
  if (!cfg.theta) return default_theta(model);
  if (static_cast<Eigen::Index>(cfg.theta->size()) != dim(model))
    throw ConfigError("/metric/theta: length does not match d = " + std::to_string(dim(model)));
  return normalized(Eigen::Map<const Vector>(cfg.theta->data(), dim(model)));
}

std::string format_record(const ExperimentConfig& cfg, const ResultRecord& r) {
  const Cell& c = *r.cell;
  const SamplerConfig& s = c.sampler;
  std::ostringstream o;
  o << kSchemaVersion << ',' << csv_escape(cfg.name) << ',' << c.index << ',' << csv_escape(c.label)
    << ',' << to_string(s.scheme) << ',' << cfg.model.type << ',' << c.d << ','
    << format_number(c.sigma) << ',' << c.m << ',' << to_string(s.kernel.kind) << ','
    << format_number(c.delta) << ',' << format_number(c.gamma_delta) << ','
    << format_number(s.kernel.L) << ',' << to_string(s.score.mode) << ',' << c.n_mc << ','
    << s.n_t << ',' << c.budget << ',' << s.n_walkers << ',' << r.seed << ','
    << format_number(r.w2) << ',' << format_number(r.minor_mode_fraction) << ','
    << format_number(r.acceptance_rate) << ',' << r.grad_evals << ',' << r.wall_ms << ','
    << csv_escape(r.status) << '\n';
  return o.str();
}

struct Payload {
  std::string result, samples, trajectory, curves;
};

// Rows arrive in any order and leave in task order, one flush per row.
class OrderedWriter {
 public:
  OrderedWriter(std::ofstream& results, std::ofstream* samples, std::ofstream* traj,
                std::ofstream* curves)
      : results_(results), samples_(samples), traj_(traj), curves_(curves) {}

  void submit(std::size_t index, Payload p) {
    std::lock_guard<std::mutex> lock(mu_);
    pending_.emplace(index, std::move(p));
    while (!pending_.empty() && pending_.begin()->first == next_) {
      const Payload& q = pending_.begin()->second;
      if (samples_) *samples_ << q.samples << std::flush;
      if (traj_) *traj_ << q.trajectory << std::flush;
      if (curves_) *curves_ << q.curves << std::flush;
      results_ << q.result << std::flush;
      pending_.erase(pending_.begin());
      ++next_;
    }
  }

 private:
  std::ofstream& results_;
  std::ofstream *samples_, *traj_, *curves_;
  std::mutex mu_;
  std::map<std::size_t, Payload> pending_;
  std::size_t next_ = 0;
};

}  // namespace

CellRun run_cell(const ExperimentConfig& cfg, const Cell& cell, std::uint64_t seed, bool omit_timing) {
  CellRun run;
  run.record.cell = &cell;
  run.record.seed = seed;
  const TargetModel model = build_model(cfg.model, cell.d);
  const auto start = std::chrono::steady_clock::now();
  Rng ref_rng(derive_seed(seed, {fnv1a(cfg.model.type), static_cast<std::uint64_t>(cell.d), 0x72656600}));
  run.reference = sample_exact(model, cell.sampler.n_walkers, ref_rng);
  try {
    run.result = run_sampler(model, cell.sampler, derive_seed(seed, {fnv1a(cell.key)}));
    const Vector theta = theta_for(cfg, model);
    auto w2_or_nan = [&](const SampleMatrix& xs) {
      return xs.allFinite() ? sliced_w2(xs, run.reference, theta) : std::nan("");
    };
    run.record.w2 = w2_or_nan(run.result.samples);
    run.record.minor_mode_fraction = minor_mode_fraction(model, run.result.samples);
    run.record.acceptance_rate = run.result.acceptance_rate();
    run.record.grad_evals = run.result.grad_evals;
    if (!run.result.samples.allFinite()) run.record.status = "non-finite samples";
    for (const auto& cp : run.result.checkpoint_samples) {
      run.checkpoint_w2.push_back(w2_or_nan(cp));
      run.checkpoint_minor.push_back(minor_mode_fraction(model, cp));
    }
  } catch (const KernelFailure& e) {
    run.record.w2 = std::nan("");
    run.record.minor_mode_fraction = std::nan("");
    run.record.status = std::string("kernel failure: ") + e.what();
  }
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  run.record.wall_ms = omit_timing ? 0 : static_cast<long>(ms.count());
  return run;
}

RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  const fs::path dir = options.output_dir.empty() ? fs::path(cfg.output) : fs::path(options.output_dir);
  fs::create_directories(dir);
  const std::vector<Cell> cells = expand_cells(cfg);

  bool any_traj = false, any_curves = false;
  json cell_list = json::array();
  for (const auto& c : cells) {
    any_traj = any_traj || c.sampler.trajectory_stride > 0;
    any_curves = any_curves || !c.sampler.checkpoints.empty();
    json entry = json::parse(c.key);
    entry["cell"] = c.index;
    entry["budget"] = c.budget;
    cell_list.push_back(entry);
  }

  json files = {{"results", "results.csv"}};
  if (cfg.write_samples) files["samples"] = "samples.csv";
  if (any_traj) files["trajectories"] = "trajectories.csv";
  if (any_curves) files["curves"] = "curves.csv";
  const json manifest = {{"schema_version", kSchemaVersion},
                         {"toolkit", "walkjump"},
                         {"version", kToolkitVersion},
                         {"config", cfg.resolved},
                         {"cells", cell_list},
                         {"seeds", cfg.seeds},
                         {"files", files},
                         {"results_header", results_header()}};
  {
    std::ofstream m(dir / "manifest.json");
    m << manifest.dump(2) << '\n';
  }

  std::ofstream results(dir / "results.csv");
  results << results_header() << '\n' << std::flush;
  std::ofstream samples, traj, curves;
  if (cfg.write_samples) {
    samples.open(dir / "samples.csv");
    samples << "schema_version,cell,label,scheme,d,seed,walker,sample\n";
  }
  if (any_traj) {
    traj.open(dir / "trajectories.csv");
    traj << "schema_version,cell,label,scheme,d,seed,walker,t,step,jump_projection,position\n";
  }
  if (any_curves) {
    curves.open(dir / "curves.csv");
    curves << "schema_version,cell,label,scheme,d,sigma,seed,t,w2,minor_mode_fraction\n";
  }
  OrderedWriter writer(results, cfg.write_samples ? &samples : nullptr, any_traj ? &traj : nullptr,
                       any_curves ? &curves : nullptr);

  const std::size_t n_tasks = cells.size() * cfg.seeds.size();
  std::mutex log_mu;
  tbb::parallel_for(std::size_t{0}, n_tasks, [&](std::size_t task) {
    const Cell& cell = cells[task / cfg.seeds.size()];
    const std::uint64_t seed = cfg.seeds[task % cfg.seeds.size()];
    CellRun run = run_cell(cfg, cell, seed, options.omit_timing);
    Payload p;
    p.result = format_record(cfg, run.record);
    const std::string prefix = std::to_string(kSchemaVersion) + ',' + std::to_string(cell.index) + ',' +
                               csv_escape(cell.label) + ',' + to_string(cell.sampler.scheme) + ',' +
                               std::to_string(cell.d) + ',' + std::to_string(seed) + ',';
    if (cfg.write_samples) {
      std::ostringstream o;
      for (Eigen::Index w = 0; w < run.result.samples.rows(); ++w)
        o << prefix << w << ',' << join_row(run.result.samples.row(w).transpose()) << '\n';
      p.samples = o.str();
    }
    if (any_traj) {
      std::ostringstream o;
      for (const auto& row : run.result.trajectory)
        o << prefix << row.walker << ',' << row.t << ',' << row.step << ','
          << format_number(row.jump_projection) << ',' << join_row(row.position) << '\n';
      p.trajectory = o.str();
    }
    if (any_curves) {
      std::ostringstream o;
      for (std::size_t k = 0; k < run.checkpoint_w2.size(); ++k)
        o << std::to_string(kSchemaVersion) << ',' << cell.index << ',' << csv_escape(cell.label) << ','
          << to_string(cell.sampler.scheme) << ',' << cell.d << ',' << format_number(cell.sigma) << ','
          << seed << ',' << run.result.checkpoint_t[k] << ',' << format_number(run.checkpoint_w2[k]) << ','
          << format_number(run.checkpoint_minor[k]) << '\n';
      p.curves = o.str();
    }
    if (options.log) {
      std::lock_guard<std::mutex> lock(log_mu);
      *options.log << "cell " << cell.index << " (" << cell.label << ", d=" << cell.d
                   << ", sigma=" << cell.sigma << ") seed " << seed << ": w2=" << run.record.w2
                   << " " << run.record.status << '\n';
    }
    writer.submit(task, std::move(p));
  }, tbb::simple_partitioner());

  RunSummary summary;
  summary.cells = cells.size();
  summary.rows = n_tasks;
  summary.output_dir = dir.string();
  return summary;
}

}  // namespace walkjump::harness
