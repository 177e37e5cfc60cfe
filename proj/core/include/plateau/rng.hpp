#pragma once

// Deterministic random streams. std::uniform_real_distribution is
// implementation-defined, so uniforms come straight from mt19937_64 output
// through the fixed rule (x >> 11) * 2^-53, giving doubles in [0, 1) with 53
// random bits. Same seed, same stream, on every platform.

#include <cstdint>
#include <random>
#include <vector>

namespace plateau {

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
  }

  uint64_t bits() { return eng_(); }

  // Uniform index in [0, n) by 128-bit multiply-shift; bias is 2^-64 per
  // draw, far below anything observable, and the rule is fixed.
  uint64_t index(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

// Independent stream seeds from one master seed (splitmix64 finalizer on
// seed + stream). Used so e.g. the collocation pool and the per-epoch
// shuffles never share a generator.
inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace plateau
