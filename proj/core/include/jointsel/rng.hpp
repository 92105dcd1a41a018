#pragma once

#include <cmath>
#include <cstdint>

namespace jointsel {

// SplitMix64 (Steele, Lea & Flood 2014): the state is a 64-bit counter
// advancing by the golden-gamma constant, and each output is an avalanche
// hash of the new state. Output k is therefore a pure function of
// (seed, k), which is what makes substream derivation and re-runs from
// recorded seeds exact.
//
// All sampling helpers are hand-rolled on top of the raw generator because
// the std::*_distribution classes are implementation-defined and would
// break bitwise reproducibility of seeded experiments across library
// versions. Draw order is part of the contract: callers consume the stream
// sequentially and derive an independent substream per parallel unit.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Finalizing hash used for both output mixing and substream derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Independent stream for a parallel unit of work: seed XOR hash(key).
// The offset keeps key 0 from collapsing onto the parent stream.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t key) {
  return seed ^ mix64(key + kGolden);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform on [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; used where log(u) must stay finite.
  double uniform_pos() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller, caching the spare of each pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Unbiased integer in [0, n); rejection sampling on the top range.
  std::uint64_t uniform_index(std::uint64_t n) {
    for (;;) {
      std::uint64_t x = next();
      std::uint64_t r = x % n;
      if (x - r <= ~std::uint64_t{0} - (n - 1)) return r;
    }
  }

  // Categorical draw by inverse CDF on one uniform. probs need not be
  // exactly normalized; shortfall lands on the last class.
  template <typename Probs>
  int categorical(const Probs& probs) {
    double u = uniform();
    double acc = 0.0;
    int last = 0;
    for (int c = 0; c < static_cast<int>(probs.size()); ++c) {
      acc += probs[c];
      last = c;
      if (u < acc) return c;
    }
    return last;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace jointsel
