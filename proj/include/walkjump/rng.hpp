#pragma once

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <cstdint>
#include <initializer_list>

#include "walkjump/types.hpp"

namespace walkjump {

// SplitMix64 finalizer; used to derive independent stream seeds from counters.
std::uint64_t mix64(std::uint64_t x);

// Deterministic seed for the stream addressed by (master, path...).  Streams
// with different paths are statistically independent.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

// One random stream.  Not thread-safe; every walker owns its own.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  static Rng derived(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(master, path));
  }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }

  template <class Derived>
  void fill_normal(Eigen::DenseBase<Derived>& out) {
    for (Eigen::Index i = 0; i < out.size(); ++i) out.derived().coeffRef(i) = normal();
  }

  Vector normal_vector(Eigen::Index d) {
    Vector v(d);
    fill_normal(v);
    return v;
  }

  boost::random::mt19937_64& engine() { return engine_; }

 private:
  boost::random::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
  boost::random::uniform_01<double> uniform_;
};

}  // namespace walkjump
