#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace lipalpha {

// splitmix64 step; used to condition seeds and to derive independent
// per-task streams from a master seed by fixed splitting.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
  return splitmix64(s);
}

// Deterministic RNG wrapper. mt19937_64 is fully specified by the
// standard, and all derived draws below avoid std distributions, whose
// output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), eng_(split_seed(seed, 0)) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform in [0,1), 53-bit resolution
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

  std::complex<double> in_disk(std::complex<double> center, double radius) {
    for (;;) {
      double x = uniform(-1.0, 1.0);
      double y = uniform(-1.0, 1.0);
      if (x * x + y * y <= 1.0) return center + radius * std::complex<double>(x, y);
    }
  }

  // Independent child stream; results do not depend on draw order of the parent.
  Rng derived(std::uint64_t stream) const { return Rng(split_seed(seed_, stream + 1)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
};

}  // namespace lipalpha
