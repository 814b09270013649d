#include "npusim/neural_engine.hpp"

namespace npusim {

namespace {

uint64_t ceil_div(uint64_t a, uint64_t b) { return (a + b - 1) / b; }

// [a0, a0+alen) vs [b0, b0+blen)
bool overlap(uint64_t a0, uint64_t alen, uint64_t b0, uint64_t blen) {
  return a0 < b0 + blen && b0 < a0 + alen;
}

bool fits(const EngineConfig& cfg, uint64_t addr, uint64_t bytes) {
  return addr % 2 == 0 && addr + bytes <= cfg.scratchpad_size;
}

OpResult account(const EngineConfig& cfg, uint64_t work, uint64_t out_bytes,
                 uint32_t overflows, uint64_t macs) {
  OpResult r;
  r.cycles_compute = ceil_div(work, cfg.mac_units);
  r.cycles_total =
      r.cycles_compute + cfg.setup_cycles + ceil_div(out_bytes, cfg.writeback_beat_bytes);
  r.overflow_count = overflows;
  r.mac_ops = macs;
  return r;
}

OpResult fault() {
  OpResult r;
  r.ok = false;
  return r;
}

}  // namespace

std::optional<uint32_t> conv_out_dim(uint32_t in, uint32_t kernel, uint32_t stride,
                                     uint32_t padding) {
  if (stride == 0 || kernel == 0) return std::nullopt;
  const int64_t span = int64_t{in} + 2 * int64_t{padding} - int64_t{kernel};
  if (span < 0) return std::nullopt;
  return static_cast<uint32_t>(span / stride + 1);
}

std::optional<uint32_t> pool_out_dim(uint32_t in, uint32_t window, uint32_t stride) {
  if (stride == 0 || window == 0 || window > in) return std::nullopt;
  return (in - window) / stride + 1;
}

ByteRange gemm_output_range(const GemmParams& p) {
  return {p.c_addr, 2 * p.m * p.n};
}

ByteRange conv_output_range(const ConvParams& p) {
  const auto oh = conv_out_dim(p.in_h, p.kernel_h, p.stride, p.padding);
  const auto ow = conv_out_dim(p.in_w, p.kernel_w, p.stride, p.padding);
  if (!oh || !ow) return {p.out_addr, 0};
  return {p.out_addr, 2 * p.out_c * *oh * *ow};
}

ByteRange pool_output_range(const PoolParams& p) {
  const auto oh = pool_out_dim(p.in_h, p.window_h, p.stride);
  const auto ow = pool_out_dim(p.in_w, p.window_w, p.stride);
  if (!oh || !ow) return {p.out_addr, 0};
  return {p.out_addr, 2 * *oh * *ow};
}

ByteRange relu_output_range(const ReluParams& p) {
  return {p.dst_addr, 2 * p.count};
}

bool gemm_params_valid(const EngineConfig& cfg, const GemmParams& p) {
  if (p.m == 0 || p.n == 0 || p.k == 0 || !p.scale.valid()) return false;
  const uint64_t a_bytes = 2ull * p.m * p.k;
  const uint64_t b_bytes = 2ull * p.k * p.n;
  const uint64_t c_bytes = 2ull * p.m * p.n;
  if (!fits(cfg, p.a_addr, a_bytes) || !fits(cfg, p.b_addr, b_bytes) ||
      !fits(cfg, p.c_addr, c_bytes)) {
    return false;
  }
  return !overlap(p.a_addr, a_bytes, p.c_addr, c_bytes) &&
         !overlap(p.b_addr, b_bytes, p.c_addr, c_bytes);
}

bool conv_params_valid(const EngineConfig& cfg, const ConvParams& p) {
  if (p.in_h == 0 || p.in_w == 0 || p.in_c == 0 || p.out_c == 0 || !p.scale.valid()) {
    return false;
  }
  const auto oh = conv_out_dim(p.in_h, p.kernel_h, p.stride, p.padding);
  const auto ow = conv_out_dim(p.in_w, p.kernel_w, p.stride, p.padding);
  if (!oh || !ow || *oh == 0 || *ow == 0) return false;
  const uint64_t in_bytes = 2ull * p.in_c * p.in_h * p.in_w;
  const uint64_t wgt_bytes = 2ull * p.out_c * p.in_c * p.kernel_h * p.kernel_w;
  const uint64_t out_bytes = 2ull * p.out_c * *oh * *ow;
  if (!fits(cfg, p.in_addr, in_bytes) || !fits(cfg, p.wgt_addr, wgt_bytes) ||
      !fits(cfg, p.out_addr, out_bytes)) {
    return false;
  }
  return !overlap(p.in_addr, in_bytes, p.out_addr, out_bytes) &&
         !overlap(p.wgt_addr, wgt_bytes, p.out_addr, out_bytes);
}

bool pool_params_valid(const EngineConfig& cfg, const PoolParams& p) {
  if (p.in_h == 0 || p.in_w == 0) return false;
  const auto oh = pool_out_dim(p.in_h, p.window_h, p.stride);
  const auto ow = pool_out_dim(p.in_w, p.window_w, p.stride);
  if (!oh || !ow) return false;
  const uint64_t in_bytes = 2ull * p.in_h * p.in_w;
  const uint64_t out_bytes = 2ull * *oh * *ow;
  if (!fits(cfg, p.in_addr, in_bytes) || !fits(cfg, p.out_addr, out_bytes)) return false;
  return !overlap(p.in_addr, in_bytes, p.out_addr, out_bytes);
}

bool relu_params_valid(const EngineConfig& cfg, const ReluParams& p) {
  if (p.count == 0) return false;
  const uint64_t bytes = 2ull * p.count;
  if (!fits(cfg, p.src_addr, bytes) || !fits(cfg, p.dst_addr, bytes)) return false;
  // In place is fine; partial overlap would corrupt the forward sweep.
  return p.src_addr == p.dst_addr || !overlap(p.src_addr, bytes, p.dst_addr, bytes);
}

OpResult execute_gemm(const EngineConfig& cfg, const GemmParams& p, Scratchpad& spm) {
  if (!gemm_params_valid(cfg, p)) return fault();
  uint32_t overflows = 0;
  for (uint32_t i = 0; i < p.m; ++i) {
    for (uint32_t j = 0; j < p.n; ++j) {
      Acc48 acc;
      for (uint32_t kk = 0; kk < p.k; ++kk) {
        const Fixed16 a{spm.load_i16(p.a_addr + 2 * (i * p.k + kk))};
        const Fixed16 b{spm.load_i16(p.b_addr + 2 * (kk * p.n + j))};
        acc = mac(acc, a, b);
      }
      const RequantResult q = requantize_full(acc, p.scale);
      if (q.clamped) ++overflows;
      spm.store_i16(p.c_addr + 2 * (i * p.n + j), q.value.raw);
    }
  }
  const uint64_t macs = uint64_t{p.m} * p.n * p.k;
  return account(cfg, macs, 2ull * p.m * p.n, overflows, macs);
}

OpResult execute_conv(const EngineConfig& cfg, const ConvParams& p, Scratchpad& spm) {
  if (!conv_params_valid(cfg, p)) return fault();
  const uint32_t out_h = *conv_out_dim(p.in_h, p.kernel_h, p.stride, p.padding);
  const uint32_t out_w = *conv_out_dim(p.in_w, p.kernel_w, p.stride, p.padding);
  uint32_t overflows = 0;
  for (uint32_t oc = 0; oc < p.out_c; ++oc) {
    for (uint32_t oy = 0; oy < out_h; ++oy) {
      for (uint32_t ox = 0; ox < out_w; ++ox) {
        Acc48 acc;
        for (uint32_t ic = 0; ic < p.in_c; ++ic) {
          for (uint32_t ky = 0; ky < p.kernel_h; ++ky) {
            const int64_t iy = int64_t{oy} * p.stride + ky - p.padding;
            if (iy < 0 || iy >= p.in_h) continue;  // zero padding
            for (uint32_t kx = 0; kx < p.kernel_w; ++kx) {
              const int64_t ix = int64_t{ox} * p.stride + kx - p.padding;
              if (ix < 0 || ix >= p.in_w) continue;
              const Fixed16 v{spm.load_i16(
                  p.in_addr + 2 * ((ic * p.in_h + static_cast<uint32_t>(iy)) * p.in_w +
                                   static_cast<uint32_t>(ix)))};
              const Fixed16 w{spm.load_i16(
                  p.wgt_addr +
                  2 * (((oc * p.in_c + ic) * p.kernel_h + ky) * p.kernel_w + kx))};
              acc = mac(acc, v, w);
            }
          }
        }
        const RequantResult q = requantize_full(acc, p.scale);
        if (q.clamped) ++overflows;
        spm.store_i16(p.out_addr + 2 * ((oc * out_h + oy) * out_w + ox), q.value.raw);
      }
    }
  }
  const uint64_t macs =
      uint64_t{p.out_c} * out_h * out_w * p.in_c * p.kernel_h * p.kernel_w;
  return account(cfg, macs, 2ull * p.out_c * out_h * out_w, overflows, macs);
}

OpResult execute_pool(const EngineConfig& cfg, const PoolParams& p, Scratchpad& spm) {
  if (!pool_params_valid(cfg, p)) return fault();
  const uint32_t out_h = *pool_out_dim(p.in_h, p.window_h, p.stride);
  const uint32_t out_w = *pool_out_dim(p.in_w, p.window_w, p.stride);
  const int64_t window_elems = int64_t{p.window_h} * p.window_w;
  for (uint32_t oy = 0; oy < out_h; ++oy) {
    for (uint32_t ox = 0; ox < out_w; ++ox) {
      int64_t sum = 0;
      int16_t best = kFixed16Min;
      for (uint32_t wy = 0; wy < p.window_h; ++wy) {
        for (uint32_t wx = 0; wx < p.window_w; ++wx) {
          const uint32_t iy = oy * p.stride + wy;
          const uint32_t ix = ox * p.stride + wx;
          const int16_t v = spm.load_i16(p.in_addr + 2 * (iy * p.in_w + ix));
          sum += v;
          if (v > best) best = v;
        }
      }
      // Avg divides the window sum by the element count, truncating toward 0.
      const int16_t out = p.mode == PoolMode::Max
                              ? best
                              : static_cast<int16_t>(sum / window_elems);
      spm.store_i16(p.out_addr + 2 * (oy * out_w + ox), out);
    }
  }
  const uint64_t reads = uint64_t{out_h} * out_w * p.window_h * p.window_w;
  return account(cfg, reads, 2ull * out_h * out_w, 0, 0);
}

OpResult execute_relu(const EngineConfig& cfg, const ReluParams& p, Scratchpad& spm) {
  if (!relu_params_valid(cfg, p)) return fault();
  for (uint32_t i = 0; i < p.count; ++i) {
    const Fixed16 v{spm.load_i16(p.src_addr + 2 * i)};
    spm.store_i16(p.dst_addr + 2 * i, relu_scalar(v).raw);
  }
  return account(cfg, p.count, 2ull * p.count, 0, 0);
}

}  // namespace npusim
