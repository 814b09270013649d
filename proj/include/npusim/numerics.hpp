#ifndef NPUSIM_NUMERICS_HPP
#define NPUSIM_NUMERICS_HPP

#include <cmath>
#include <cstdint>

namespace npusim {

// ---------------------------------------------------------------------------
// Datapath number formats.
//
// The engine computes on raw two's-complement integers: 16-bit operands and a
// 48-bit saturating accumulator (the accumulator width the DSP48E1 slices the
// tile maps onto provide). A Q-format fractional-bit count exists only for
// host-side encode/decode of real values (default Q8.8); it never enters
// datapath arithmetic.
// ---------------------------------------------------------------------------

inline constexpr int32_t kFixed16Max = 32767;
inline constexpr int32_t kFixed16Min = -32768;
inline constexpr int64_t kAcc48Max = (int64_t{1} << 47) - 1;
inline constexpr int64_t kAcc48Min = -(int64_t{1} << 47);
inline constexpr int kDefaultFracBits = 8;  // Q8.8

// 16-bit datapath operand.
struct Fixed16 {
  int16_t raw = 0;

  friend bool operator==(Fixed16 a, Fixed16 b) { return a.raw == b.raw; }
};

// 48-bit accumulator, stored sign-extended in 64 bits. `overflow` is sticky:
// once an accumulation step saturates it stays set for the rest of the chain.
struct Acc48 {
  int64_t raw = 0;
  bool overflow = false;
};

enum class Rounding : uint8_t {
  Truncate = 0,  // arithmetic right shift (floor)
  HalfUp = 1,    // floor((x + 2^(s-1)) >> s): ties round toward +inf
};

// Writeback narrowing policy: shift, round, clamp to the 16-bit range.
// The engine always saturates; the flag exists so host tooling can echo it.
struct ScaleSpec {
  uint8_t right_shift = 0;  // <= 47
  Rounding rounding = Rounding::Truncate;
  bool saturate = true;

  bool valid() const { return right_shift <= 47 && saturate; }
};

// One multiply-accumulate step. |a*b| <= 2^30 and |acc| <= 2^47, so the sum
// is exact in 64 bits before the 48-bit clamp.
inline Acc48 mac(Acc48 acc, Fixed16 a, Fixed16 b) {
  const int64_t sum = acc.raw + int64_t{a.raw} * int64_t{b.raw};
  if (sum > kAcc48Max) return {kAcc48Max, true};
  if (sum < kAcc48Min) return {kAcc48Min, true};
  return {sum, acc.overflow};
}

// Shift-and-round per ScaleSpec, before clamping. C++20 guarantees the
// arithmetic right shift on negative values.
inline int64_t shift_round(int64_t value, uint8_t shift, Rounding rounding) {
  if (shift == 0) return value;
  if (rounding == Rounding::HalfUp) value += int64_t{1} << (shift - 1);
  return value >> shift;
}

struct RequantResult {
  Fixed16 value;
  bool clamped = false;  // hit a 16-bit rail (or the accumulator had overflowed)
};

inline RequantResult requantize_full(Acc48 acc, const ScaleSpec& scale) {
  int64_t v = shift_round(acc.raw, scale.right_shift, scale.rounding);
  bool clamped = acc.overflow;
  if (v > kFixed16Max) {
    v = kFixed16Max;
    clamped = true;
  } else if (v < kFixed16Min) {
    v = kFixed16Min;
    clamped = true;
  }
  return {Fixed16{static_cast<int16_t>(v)}, clamped};
}

inline Fixed16 requantize(Acc48 acc, const ScaleSpec& scale) {
  return requantize_full(acc, scale).value;
}

inline Fixed16 relu_scalar(Fixed16 x) {
  return Fixed16{x.raw < 0 ? int16_t{0} : x.raw};
}

// Host-side Q-format encode/decode. Round-to-nearest, clamped to range.
inline Fixed16 fixed_from_real(double v, int frac_bits = kDefaultFracBits) {
  double scaled = std::nearbyint(v * static_cast<double>(int64_t{1} << frac_bits));
  if (scaled > kFixed16Max) scaled = kFixed16Max;
  if (scaled < kFixed16Min) scaled = kFixed16Min;
  return Fixed16{static_cast<int16_t>(scaled)};
}

inline double fixed_to_real(Fixed16 v, int frac_bits = kDefaultFracBits) {
  return static_cast<double>(v.raw) / static_cast<double>(int64_t{1} << frac_bits);
}

}  // namespace npusim

#endif  // NPUSIM_NUMERICS_HPP
