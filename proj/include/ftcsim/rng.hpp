#pragma once

#include <cmath>
#include <cstdint>

namespace ftcsim {

// Deterministic counter-style generator (splitmix64). The point of rolling
// our own instead of <random> is reproducibility: the stream is fully
// specified by the code below, so the same seed yields the same dataset and
// the same sample indices on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1) with 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n), n > 0 (Lemire multiply-shift, no modulo bias worth caring about here)
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // standard normal via Box-Muller; consumes exactly two uniform draws
  double normal() {
    const double two_pi = 6.283185307179586476925286766559;
    double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  std::uint64_t state_;
};

// Independent stream for (base, salt); gives each Monte-Carlo run, agent or
// helper its own deterministic substream.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  Rng r(base ^ (0x9E3779B97F4A7C15ull * (salt + 1)));
  return r.next_u64();
}

}  // namespace ftcsim
