#include "npusim/reference.hpp"

#include <algorithm>

namespace npusim::ref {

namespace {

int16_t narrow(int64_t acc, const ScaleSpec& scale) {
  // Same narrowing policy, written against plain 64-bit host values.
  if (acc > kAcc48Max) acc = kAcc48Max;
  if (acc < kAcc48Min) acc = kAcc48Min;
  if (scale.right_shift > 0) {
    if (scale.rounding == Rounding::HalfUp) acc += int64_t{1} << (scale.right_shift - 1);
    acc >>= scale.right_shift;
  }
  return static_cast<int16_t>(std::clamp<int64_t>(acc, kFixed16Min, kFixed16Max));
}

int64_t sat48(int64_t acc) { return std::clamp(acc, kAcc48Min, kAcc48Max); }

}  // namespace

std::vector<int16_t> gemm(const GemmParams& p, const std::vector<int16_t>& a,
                          const std::vector<int16_t>& b) {
  std::vector<int16_t> c(size_t{p.m} * p.n, 0);
  for (uint32_t i = 0; i < p.m; ++i) {
    for (uint32_t j = 0; j < p.n; ++j) {
      int64_t acc = 0;
      for (uint32_t kk = 0; kk < p.k; ++kk) {
        acc = sat48(acc + int64_t{a[i * p.k + kk]} * b[kk * p.n + j]);
      }
      c[i * p.n + j] = narrow(acc, p.scale);
    }
  }
  return c;
}

std::vector<int16_t> conv(const ConvParams& p, const std::vector<int16_t>& input,
                          const std::vector<int16_t>& weights) {
  const auto oh = conv_out_dim(p.in_h, p.kernel_h, p.stride, p.padding);
  const auto ow = conv_out_dim(p.in_w, p.kernel_w, p.stride, p.padding);
  if (!oh || !ow) return {};
  std::vector<int16_t> out(size_t{p.out_c} * *oh * *ow, 0);
  for (uint32_t oc = 0; oc < p.out_c; ++oc) {
    for (uint32_t oy = 0; oy < *oh; ++oy) {
      for (uint32_t ox = 0; ox < *ow; ++ox) {
        int64_t acc = 0;
        for (uint32_t ic = 0; ic < p.in_c; ++ic) {
          for (uint32_t ky = 0; ky < p.kernel_h; ++ky) {
            const int64_t iy = int64_t{oy} * p.stride + ky - p.padding;
            if (iy < 0 || iy >= p.in_h) continue;
            for (uint32_t kx = 0; kx < p.kernel_w; ++kx) {
              const int64_t ix = int64_t{ox} * p.stride + kx - p.padding;
              if (ix < 0 || ix >= p.in_w) continue;
              const int64_t v = input[(ic * p.in_h + iy) * p.in_w + ix];
              const int64_t w =
                  weights[((oc * p.in_c + ic) * p.kernel_h + ky) * p.kernel_w + kx];
              acc = sat48(acc + v * w);
            }
          }
        }
        out[(oc * *oh + oy) * *ow + ox] = narrow(acc, p.scale);
      }
    }
  }
  return out;
}

std::vector<int16_t> pool(const PoolParams& p, const std::vector<int16_t>& input) {
  const auto oh = pool_out_dim(p.in_h, p.window_h, p.stride);
  const auto ow = pool_out_dim(p.in_w, p.window_w, p.stride);
  if (!oh || !ow) return {};
  std::vector<int16_t> out(size_t{*oh} * *ow, 0);
  const int64_t elems = int64_t{p.window_h} * p.window_w;
  for (uint32_t oy = 0; oy < *oh; ++oy) {
    for (uint32_t ox = 0; ox < *ow; ++ox) {
      int64_t sum = 0;
      int64_t best = kFixed16Min;
      for (uint32_t wy = 0; wy < p.window_h; ++wy) {
        for (uint32_t wx = 0; wx < p.window_w; ++wx) {
          const int64_t v = input[(oy * p.stride + wy) * p.in_w + (ox * p.stride + wx)];
          sum += v;
          best = std::max(best, v);
        }
      }
      out[oy * *ow + ox] =
          static_cast<int16_t>(p.mode == PoolMode::Max ? best : sum / elems);
    }
  }
  return out;
}

std::vector<int16_t> relu(const std::vector<int16_t>& input) {
  std::vector<int16_t> out(input.size());
  std::transform(input.begin(), input.end(), out.begin(),
                 [](int16_t v) { return v < 0 ? int16_t{0} : v; });
  return out;
}

}  // namespace npusim::ref
