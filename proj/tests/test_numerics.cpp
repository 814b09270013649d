#include <doctest.h>

#include <algorithm>
#include <vector>

#include "npusim/numerics.hpp"
#include "npusim/rng.hpp"
#include "oracles.hpp"

using namespace npusim;

TEST_CASE("mac: small products") {
  CHECK(mac({}, {2}, {3}).raw == 6);
  CHECK_FALSE(mac({}, {2}, {3}).overflow);
  CHECK(mac({}, {-1}, {32767}).raw == -32767);
  CHECK(mac({10, false}, {4}, {-5}).raw == -10);
}

TEST_CASE("mac: single products never saturate") {
  // |a*b| <= 2^30 < 2^47, so any lone product is exact.
  Rng rng(11);
  for (int i = 0; i < 20000; ++i) {
    const Fixed16 a{rng.next_i16()};
    const Fixed16 b{rng.next_i16()};
    const Acc48 r = mac({}, a, b);
    CHECK(r.raw == int64_t{a.raw} * b.raw);
    CHECK_FALSE(r.overflow);
  }
  // corner values
  for (int16_t a : {int16_t{-32768}, int16_t{32767}, int16_t{0}, int16_t{1}, int16_t{-1}}) {
    for (int16_t b : {int16_t{-32768}, int16_t{32767}, int16_t{0}, int16_t{1}, int16_t{-1}}) {
      const Acc48 r = mac({}, {a}, {b});
      CHECK(r.raw == int64_t{a} * b);
      CHECK_FALSE(r.overflow);
    }
  }
}

TEST_CASE("mac: 10^4 random triples match the wide-integer oracle") {
  Rng rng(12);
  for (int i = 0; i < 10000; ++i) {
    // Bias some accumulators toward the rails so saturation is exercised.
    int64_t acc = static_cast<int64_t>(rng.next()) >> 16;  // ~48-bit range
    if (acc > kAcc48Max) acc = kAcc48Max;
    if (acc < kAcc48Min) acc = kAcc48Min;
    if (i % 7 == 0) acc = kAcc48Max - static_cast<int64_t>(rng.below(1 << 20));
    if (i % 11 == 0) acc = kAcc48Min + static_cast<int64_t>(rng.below(1 << 20));
    const Fixed16 a{rng.next_i16()};
    const Fixed16 b{rng.next_i16()};

    const Acc48 got = mac({acc, false}, a, b);
    const auto want = oracle::mac(acc, a.raw, b.raw);
    CHECK(got.raw == want.value);
    CHECK(got.overflow == want.saturated);
  }
}

TEST_CASE("mac: overflow flag is sticky along a chain") {
  Acc48 acc{kAcc48Max, false};
  acc = mac(acc, {32767}, {32767});
  CHECK(acc.overflow);
  acc = mac(acc, {1}, {-1});  // later non-saturating step keeps the flag
  CHECK(acc.overflow);
}

TEST_CASE("requantize: saturation bounds and stated rounding") {
  CHECK(requantize({40000, false}, {0, Rounding::Truncate, true}).raw == 32767);
  CHECK(requantize({-40000, false}, {0, Rounding::Truncate, true}).raw == -32768);
  // 300/16 = 18.75, half-up -> 19
  CHECK(requantize({300, false}, {4, Rounding::HalfUp, true}).raw == 19);
  CHECK(requantize({300, false}, {4, Rounding::Truncate, true}).raw == 18);
  CHECK(oracle::requantize(300, 4, true) == 19);
}

TEST_CASE("requantize: random sweep against the rational oracle") {
  Rng rng(13);
  for (int i = 0; i < 20000; ++i) {
    int64_t acc = static_cast<int64_t>(rng.next()) >> 16;
    if (acc > kAcc48Max) acc = kAcc48Max;
    if (acc < kAcc48Min) acc = kAcc48Min;
    const auto shift = static_cast<uint8_t>(rng.below(48));
    const bool half_up = rng.below(2) == 1;
    const ScaleSpec scale{shift, half_up ? Rounding::HalfUp : Rounding::Truncate, true};
    CHECK(requantize({acc, false}, scale).raw == oracle::requantize(acc, shift, half_up));
  }
}

TEST_CASE("requantize: monotone non-decreasing in the accumulator") {
  Rng rng(14);
  for (int i = 0; i < 5000; ++i) {
    int64_t a = static_cast<int64_t>(rng.next()) >> 20;
    int64_t b = static_cast<int64_t>(rng.next()) >> 20;
    if (a > b) std::swap(a, b);
    const auto shift = static_cast<uint8_t>(rng.below(48));
    const ScaleSpec scale{shift, rng.below(2) ? Rounding::HalfUp : Rounding::Truncate,
                          true};
    CHECK(requantize({a, false}, scale).raw <= requantize({b, false}, scale).raw);
  }
}

TEST_CASE("requantize: clamp flag reports saturated writebacks") {
  CHECK(requantize_full({40000, false}, {0, Rounding::Truncate, true}).clamped);
  CHECK_FALSE(requantize_full({123, false}, {0, Rounding::Truncate, true}).clamped);
  // A previously-overflowed accumulator marks the writeback too.
  CHECK(requantize_full({0, true}, {0, Rounding::Truncate, true}).clamped);
}

TEST_CASE("relu_scalar") {
  CHECK(relu_scalar({-5}).raw == 0);
  CHECK(relu_scalar({0}).raw == 0);
  CHECK(relu_scalar({32767}).raw == 32767);
  CHECK(relu_scalar({-32768}).raw == 0);

  Rng rng(15);
  for (int i = 0; i < 5000; ++i) {
    const Fixed16 x{rng.next_i16()};
    const Fixed16 once = relu_scalar(x);
    CHECK(relu_scalar(once).raw == once.raw);  // idempotent
    CHECK(once.raw >= 0);
  }
}

TEST_CASE("accumulation order does not matter without saturation") {
  Rng rng(16);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<int16_t, int16_t>> pairs(1 + rng.below(64));
    for (auto& p : pairs) p = {rng.next_i16(), rng.next_i16()};

    const auto run = [&](const std::vector<std::pair<int16_t, int16_t>>& ps) {
      Acc48 acc;
      for (const auto& [a, b] : ps) acc = mac(acc, {a}, {b});
      return acc;
    };
    const Acc48 fwd = run(pairs);
    if (fwd.overflow) continue;  // order independence is claimed unsaturated only

    auto shuffled = pairs;
    for (size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    }
    CHECK(run(shuffled).raw == fwd.raw);
  }
}

TEST_CASE("host-side Q-format encode/decode") {
  CHECK(fixed_from_real(1.0).raw == 256);  // Q8.8
  CHECK(fixed_from_real(-1.5).raw == -384);
  CHECK(fixed_to_real({256}) == doctest::Approx(1.0));
  CHECK(fixed_from_real(1000.0).raw == 32767);   // clamped
  CHECK(fixed_from_real(-1000.0).raw == -32768);
  CHECK(fixed_from_real(0.5, 0).raw == 0);  // frac_bits 0: raw integers
}
