#ifndef NPUSIM_NEURAL_ENGINE_HPP
#define NPUSIM_NEURAL_ENGINE_HPP

#include <cstdint>
#include <optional>

#include "npusim/memory.hpp"
#include "npusim/numerics.hpp"

namespace npusim {

// Tile parameters. Defaults are the reference configuration:
//   MAC_UNITS 16, SCRATCHPAD_SIZE 8192, DMA_BURST_SIZE 64, DATA_WIDTH 16,
//   ADDR_WIDTH 32, 100 MHz single clock.
struct EngineConfig {
  uint32_t mac_units = 16;  // parallel multiply-accumulate lanes, 4..32
  uint32_t scratchpad_size = 8192;
  uint32_t dma_burst_size = 64;
  uint32_t data_width = 16;  // fixed by the datapath
  uint32_t addr_width = 32;  // fixed by the bus
  uint64_t clock_hz = 100'000'000;

  // Overhead model: cycles_total = cycles_compute + setup_cycles +
  // ceil(output_bytes / writeback_beat_bytes).
  uint32_t setup_cycles = 16;
  uint32_t writeback_beat_bytes = 4;

  bool valid() const {
    return mac_units >= 4 && mac_units <= 32 && scratchpad_size > 0 &&
           dma_burst_size > 0 && data_width == 16 && addr_width == 32 &&
           clock_hz > 0 && writeback_beat_bytes > 0;
  }
};

// All addresses below are byte offsets into the scratchpad; elements are
// 2 bytes, row-major, no inter-row padding, 2-byte aligned.

struct GemmParams {
  uint32_t m = 0, n = 0, k = 0;            // C[m x n] = A[m x k] * B[k x n]
  uint32_t a_addr = 0, b_addr = 0, c_addr = 0;
  ScaleSpec scale;
};

// Input [in_c][in_h][in_w], weights [out_c][in_c][kernel_h][kernel_w],
// output [out_c][out_h][out_w]; zero padding; cross-correlation.
struct ConvParams {
  uint32_t in_h = 0, in_w = 0, in_c = 0, out_c = 0;
  uint32_t kernel_h = 0, kernel_w = 0;
  uint32_t stride = 1, padding = 0;
  uint32_t in_addr = 0, wgt_addr = 0, out_addr = 0;
  ScaleSpec scale;
};

enum class PoolMode : uint8_t { Max = 0, Avg = 1 };

// Single 2-D plane; Avg divides the window sum by the element count,
// truncating toward zero.
struct PoolParams {
  PoolMode mode = PoolMode::Max;
  uint32_t window_h = 0, window_w = 0;
  uint32_t stride = 1;
  uint32_t in_h = 0, in_w = 0;
  uint32_t in_addr = 0, out_addr = 0;
};

struct ReluParams {
  uint32_t count = 0;
  uint32_t src_addr = 0, dst_addr = 0;  // equal (in place) or disjoint
};

struct OpResult {
  uint64_t cycles_compute = 0;  // ceil(work / mac_units)
  uint64_t cycles_total = 0;    // compute + setup + writeback beats
  uint32_t overflow_count = 0;  // saturated writebacks
  uint64_t mac_ops = 0;         // MACs retired (gemm/conv; 0 otherwise)
  bool ok = true;               // false: parameter/footprint fault, no writes
};

// Output dimensions; nullopt when the shape is degenerate.
std::optional<uint32_t> conv_out_dim(uint32_t in, uint32_t kernel,
                                     uint32_t stride, uint32_t padding);
std::optional<uint32_t> pool_out_dim(uint32_t in, uint32_t window, uint32_t stride);

// Parameter/footprint validation: dimensions positive, operand and result
// footprints inside the scratchpad, inputs disjoint from the output.
bool gemm_params_valid(const EngineConfig& cfg, const GemmParams& p);
bool conv_params_valid(const EngineConfig& cfg, const ConvParams& p);
bool pool_params_valid(const EngineConfig& cfg, const PoolParams& p);
bool relu_params_valid(const EngineConfig& cfg, const ReluParams& p);

// Byte range [offset, offset + bytes) an op writes; used by the cycle model
// and the locality tests.
struct ByteRange {
  uint32_t offset = 0;
  uint32_t bytes = 0;
};
ByteRange gemm_output_range(const GemmParams& p);
ByteRange conv_output_range(const ConvParams& p);
ByteRange pool_output_range(const PoolParams& p);
ByteRange relu_output_range(const ReluParams& p);

// Operation executors. Each validates, computes the result into the
// scratchpad (writes confined to the output range above) and fills in the
// deterministic cycle accounting. On a validation failure nothing is written
// and result.ok is false.
//
// Accumulation order is fixed: gemm reduces over k ascending; conv over
// (in_c, kernel_h, kernel_w) lexicographic. Saturating cases depend on it.
OpResult execute_gemm(const EngineConfig& cfg, const GemmParams& p, Scratchpad& spm);
OpResult execute_conv(const EngineConfig& cfg, const ConvParams& p, Scratchpad& spm);
OpResult execute_pool(const EngineConfig& cfg, const PoolParams& p, Scratchpad& spm);
OpResult execute_relu(const EngineConfig& cfg, const ReluParams& p, Scratchpad& spm);

}  // namespace npusim

#endif  // NPUSIM_NEURAL_ENGINE_HPP
