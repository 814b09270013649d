#ifndef NPUSIM_SOC_HPP
#define NPUSIM_SOC_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "npusim/bus.hpp"
#include "npusim/dma.hpp"
#include "npusim/memory.hpp"
#include "npusim/memory_map.hpp"
#include "npusim/neural_engine.hpp"
#include "npusim/pcpi.hpp"
#include "npusim/perf.hpp"
#include "npusim/register_file.hpp"

namespace npusim {

struct SocConfig {
  EngineConfig engine;
  StallModel dma_stall;
};

// ---------------------------------------------------------------------------
// Whole-SoC composition and deterministic cycle stepping.
//
// Per cycle (step()):
//   1. the DMA engine services one burst of the head transfer (bus priority),
//   2. a busy engine operation advances one cycle; on its last cycle the
//      register file takes the BUSY->DONE edge and latches CYCLE_COUNT,
//   3. counters update.
//
// The control core is not cycle-emulated (only its bus and co-processor
// interfaces are part of the model), so host/CPU MMIO accesses consume no
// simulated time of their own. When the DMA would use the bus in the next
// cycle, a CPU access first steps that cycle (DMA granted first) and charges
// one CPU stall, which is the §-bus priority rule's observable effect.
// Polling advances time explicitly: one cycle per poll iteration.
//
// Compute operations are evaluated functionally at the accepted START
// (operand fetch and result commit happen then); the BUSY interval models
// timing only. LOAD/STORE operations stay BUSY until their DMA transfer
// drains, so their latency is the measured transfer time.
// ---------------------------------------------------------------------------
class SocSimulator {
 public:
  explicit SocSimulator(SocConfig cfg = {});

  // Non-copyable: internal wiring holds references.
  SocSimulator(const SocSimulator&) = delete;
  SocSimulator& operator=(const SocSimulator&) = delete;

  const SocConfig& config() const { return cfg_; }
  uint64_t cycle() const { return cycle_; }

  void step(uint64_t cycles = 1);

  // CPU-side MMIO.
  BusReply cpu_read32(uint32_t addr);
  BusFault cpu_write32(uint32_t addr, uint32_t data);

  // Poll `addr` until (value & mask) == value_expected, stepping one cycle per
  // iteration, for at most timeout_cycles simulated cycles.
  struct PollResult {
    bool matched = false;
    uint32_t last_value = 0;
    uint64_t cycles_elapsed = 0;
  };
  PollResult cpu_poll32(uint32_t addr, uint32_t mask, uint32_t value_expected,
                        uint64_t timeout_cycles);

  // Co-processor path.
  PcpiError pcpi_issue(const PcpiRequest& req);
  PcpiResponse pcpi_poll() { return pcpi_.poll(); }

  // Host-side descriptor submission (the front end scripts/workloads use).
  DmaEngine::SubmitResult dma_submit(std::span<const DmaDescriptor> table,
                                     uint32_t head = 0);
  TransferState dma_query(DmaTicket t) const { return dma_.query(t); }
  // Steps until the transfer leaves Pending or the budget runs out.
  TransferState dma_drain(DmaTicket t, uint64_t max_cycles);

  // Raw little-endian memory images at a bus base address (data memories
  // only). False on any out-of-range byte; partial writes are not applied.
  bool load_image(uint32_t base, std::span<const uint8_t> bytes);
  bool dump_image(uint32_t base, std::span<uint8_t> out) const;

  // Component access (tests, report generation, the CLI).
  RegisterFile& regs() { return regs_; }
  const RegisterFile& regs() const { return regs_; }
  Scratchpad& scratchpad() { return spm_; }
  const Scratchpad& scratchpad() const { return spm_; }
  MainRam& main_ram() { return ram_; }
  const PerfCounters& perf() const { return perf_; }
  const Bus& bus() const { return *bus_; }
  DmaEngine& dma() { return dma_; }
  const std::optional<OpResult>& last_op_result() const { return last_op_; }

 private:
  void step_one();
  void service_pending_start();
  bool validate_start(const StartEvent& ev) const;
  void launch(const StartEvent& ev);
  void complete_op(bool failed);

  static GemmParams decode_gemm(const StartEvent& ev);
  static ConvParams decode_conv(const StartEvent& ev);
  static PoolParams decode_pool(const StartEvent& ev);
  static ReluParams decode_relu(const StartEvent& ev);
  static DmaDescriptor decode_transfer(const StartEvent& ev);

  SocConfig cfg_;
  uint64_t cycle_ = 0;

  MainRam ram_;
  Scratchpad spm_;
  UartModel uart_;
  RegisterFile regs_;
  PerfCounters perf_;
  std::unique_ptr<Bus> bus_;
  DmaEngine dma_;
  PcpiBridge pcpi_;

  // In-flight operation bookkeeping.
  bool op_active_ = false;
  uint64_t op_cycles_left_ = 0;      // compute ops
  std::optional<DmaTicket> op_dma_;  // LOAD/STORE ops
  uint64_t op_start_cycle_ = 0;
  OpResult op_result_;
  std::optional<OpResult> last_op_;
};

}  // namespace npusim

#endif  // NPUSIM_SOC_HPP
