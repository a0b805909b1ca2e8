#pragma once

#include <cstdint>
#include <random>

#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace gwsv {

// Random stream used by all samplers.  The engine is std::mt19937_64 but the
// distributions come from Boost, whose algorithms are pinned, so a fixed seed
// reproduces the same draws on any platform.  One stream per chain; streams
// are never shared between threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return boost::random::uniform_01<double>()(eng_); }

  double normal(double mean = 0.0, double sd = 1.0) {
    return boost::random::normal_distribution<double>(mean, sd)(eng_);
  }

  double chi_squared(double df) {
    return boost::random::chi_squared_distribution<double>(df)(eng_);
  }

  // shape/rate parameterization
  double gamma(double shape, double rate) {
    return boost::random::gamma_distribution<double>(shape, 1.0 / rate)(eng_);
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace gwsv
