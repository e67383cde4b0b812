#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace rnloc {

// Stateless splitmix64 finalizer. Used for seeding and for deriving
// independent per-trial streams from (master seed, counter).
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Counter-based stream split: stream k of a master seed. Trials, network
// generation and activation schedules each get their own stream, so parallel
// and serial execution see identical draws.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t counter) {
  return mix64(master + 0x9e3779b97f4a7c15ULL * (counter + 1));
}

// xoshiro256++ with splitmix64 seeding. Self-contained so that seeded runs
// are bit-reproducible independent of the standard library in use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
      s += 0x9e3779b97f4a7c15ULL;
      word = mix64(s);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). Lemire's multiply-shift; n must be positive.
  int uniform_int(int n) {
    const auto range = static_cast<std::uint64_t>(n);
    return static_cast<int>(
        static_cast<std::uint64_t>((static_cast<__uint128_t>(next_u64()) * range) >> 64));
  }

  // Standard normal via Marsaglia's polar method (caches the spare deviate).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, q;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rnloc
