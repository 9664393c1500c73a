#pragma once

#include <cstdint>

namespace starkit {

// Counter-based generator built on the SplitMix64 finalizer: output k is a
// pure function of (key, k), so parallel streams derived from (seed, stream)
// never couple and replays are bit-exact across platforms.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ULL))) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() { return mix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

  // uniform in [0,1), 53 significant bits
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // standard normal via Box-Muller on counter outputs
  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double(), u2 = next_double();
    if (u1 < 1e-300) u1 = 1e-300;
    const double r = __builtin_sqrt(-2.0 * __builtin_log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * __builtin_sin(a);
    have_spare_ = true;
    return r * __builtin_cos(a);
  }

  int uniform_int(int lo, int hi) { // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

} // namespace starkit
