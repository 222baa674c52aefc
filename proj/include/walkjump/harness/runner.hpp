#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "walkjump/harness/config.hpp"

namespace walkjump::harness {

struct RunOptions {
  std::string output_dir;      // overrides config.output when non-empty
  bool omit_timing = false;    // write wall_ms = 0 so reruns are byte-identical
  std::ostream* log = nullptr;
};

struct ResultRecord {
  const Cell* cell = nullptr;
  std::uint64_t seed = 0;
  double w2 = 0.0;
  double minor_mode_fraction = 0.0;
  double acceptance_rate = 1.0;
  std::uint64_t grad_evals = 0;
  long wall_ms = 0;
  std::string status = "ok";
};

struct CellRun {
  ResultRecord record;
  SamplerResult result;
  SampleMatrix reference;
  std::vector<double> checkpoint_w2;
  std::vector<double> checkpoint_minor;
};

// Runs one (cell, seed) pair; identical inputs give identical records.
CellRun run_cell(const ExperimentConfig& cfg, const Cell& cell, std::uint64_t seed, bool omit_timing);

struct RunSummary {
  std::size_t cells = 0;
  std::size_t rows = 0;
  std::string output_dir;
};

// Writes results.csv, manifest.json and, when enabled, samples.csv,
// trajectories.csv and curves.csv into the output directory.
RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options);

std::string results_header();
std::string format_number(double v);

}  // namespace walkjump::harness
