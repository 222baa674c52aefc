#pragma once

#include <optional>
#include <string>
#include <vector>

#include "walkjump/harness/config.hpp"

namespace walkjump::harness {

struct AnalyzeArgs {
  std::vector<double> tau2{0.1, 1.0};
  std::optional<double> sigma;
  std::optional<double> sigma2;
  int t = 1;
  int t_max = 1000;
  int m = 1;
  int m_max = 64;
  double tau = 1.0;
  double R = 3.0;
  double mu = 3.0;
  double alpha = 0.5;
  double L = 1.0;
  double mu_growth = 1.0;
  double Delta = 0.0;
  std::vector<double> x0;
  std::vector<double> y;
  int d = 1;
  long n_mc = 100000;
  std::uint64_t seed = 0;
  bool validate = false;
  std::vector<double> means;
  std::vector<int> ms;
};

std::vector<std::string> analyze_quantities();

// JSON report for one quantity; unknown names raise ConfigError.
json analyze(const std::string& quantity, const AnalyzeArgs& args);

}  // namespace walkjump::harness
