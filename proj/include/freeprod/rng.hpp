#ifndef FREEPROD_RNG_HPP
#define FREEPROD_RNG_HPP

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <complex>
#include <cstdint>

namespace freeprod {

std::uint64_t splitmix64(std::uint64_t& state);

// Independent stream key for (master seed, sample index, factor index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sample, std::uint64_t factor);

/// Boost distributions rather than <random> ones so draws are identical
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  // E|w|^2 = 1, real and imaginary parts independent.
  std::complex<double> complex_normal();

 private:
  boost::random::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
  boost::random::uniform_01<double> uniform_;
};

}  // namespace freeprod

#endif  // FREEPROD_RNG_HPP
