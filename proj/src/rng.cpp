#include "freeprod/rng.hpp"

#include <cmath>

namespace freeprod {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sample, std::uint64_t factor) {
  std::uint64_t state = master;
  std::uint64_t key = splitmix64(state);
  state = key ^ sample;
  key = splitmix64(state);
  state = key ^ (factor * 0xd1b54a32d192ed03ULL);
  return splitmix64(state);
}

std::complex<double> Rng::complex_normal() {
  const double re = normal(), im = normal();
  return {re * M_SQRT1_2, im * M_SQRT1_2};
}

}  // namespace freeprod
