#ifndef NPUSIM_RNG_HPP
#define NPUSIM_RNG_HPP

#include <cstdint>

namespace npusim {

// SplitMix64 (Steele/Lea/Flood). Used instead of <random> engines because the
// standard does not pin uniform_int_distribution output across library
// implementations, and byte-identical replay from a seed is a hard contract
// of the simulator (reports, generated workload data, stall schedules).
inline uint64_t mix64(uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound). bound == 0 yields 0. Modulo bias is irrelevant at
  // the ranges used here and keeps the stream layout trivial to reason about.
  uint64_t below(uint64_t bound) { return bound ? next() % bound : 0; }

  // Uniform in [lo, hi], inclusive.
  int64_t range(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo) + 1));
  }

  int16_t next_i16() { return static_cast<int16_t>(next() & 0xFFFF); }

  // Derive an independent stream (per operand, per op index, ...).
  Rng fork(uint64_t salt) const { return Rng(mix64(state_ ^ salt)); }

 private:
  uint64_t state_;
};

}  // namespace npusim

#endif  // NPUSIM_RNG_HPP
