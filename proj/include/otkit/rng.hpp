#pragma once

#include <cstdint>

namespace otkit {

// Counter-based generator: draw k of stream `seed` is splitmix64(seed + (k+1)*0x9E3779B97F4A7C15).
// Pure integer arithmetic, so sequences are identical on every platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t at(std::uint64_t counter) const {
    return mix(seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL);
  }

  std::uint64_t next() { return at(counter_++); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_positive() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  // Independent stream derived from this seed, e.g. one per trial.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    return mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace otkit
