#ifndef NPUSIM_BUS_HPP
#define NPUSIM_BUS_HPP

#include <cstdint>
#include <vector>

#include "npusim/memory.hpp"
#include "npusim/memory_map.hpp"

namespace npusim {

enum class BusMaster : uint8_t { Cpu, Dma };
enum class BusOp : uint8_t { Read32, Write32 };

struct BusTransaction {
  uint32_t addr = 0;
  BusOp kind = BusOp::Read32;
  uint32_t data = 0;  // writes
  BusMaster master = BusMaster::Cpu;
};

enum class BusFault : uint8_t {
  None = 0,
  Unmapped,     // address outside every region
  Misaligned,   // 32-bit access not 4-byte aligned
};

const char* bus_fault_name(BusFault fault);

struct BusReply {
  uint32_t data = 0;  // 0 on fault
  BusFault fault = BusFault::None;
};

struct FaultRecord {
  BusTransaction txn;
  BusFault fault = BusFault::None;
  uint64_t cycle = 0;
};

// Grant ordering for one cycle's pending transactions: DMA traffic first
// (stable within a master). The contending CPU transaction lands one cycle
// later; the stall is charged by the simulator's cycle accounting.
std::vector<BusTransaction> arbitrate(std::vector<BusTransaction> pending);

// Devices with word-register semantics behind a bus window (neural registers,
// perf counters).
struct MmioDevice {
  virtual ~MmioDevice() = default;
  virtual uint32_t mmio_read(uint32_t offset) = 0;
  virtual void mmio_write(uint32_t offset, uint32_t word) = 0;
};

// Address decode and routing. Faults are recorded and returned to the
// initiating master; simulation continues.
class Bus {
 public:
  Bus(MemoryMap map, MainRam& ram, Scratchpad& spm, UartModel& uart,
      MmioDevice& neural_regs, MmioDevice& perf_counters)
      : map_(std::move(map)),
        ram_(ram),
        spm_(spm),
        uart_(uart),
        regs_(neural_regs),
        perf_(perf_counters) {}

  const MemoryMap& map() const { return map_; }

  // 32-bit transactions (CPU-style MMIO; all bus traffic is word sized).
  BusReply read32(uint32_t addr, BusMaster master, uint64_t cycle);
  BusFault write32(uint32_t addr, uint32_t data, BusMaster master, uint64_t cycle);

  // DMA data path: byte granular, data memories only (MainRam, Scratchpad).
  // Anything else faults, which fails the owning transfer.
  bool dma_read8(uint32_t addr, uint8_t& out, uint64_t cycle);
  bool dma_write8(uint32_t addr, uint8_t v, uint64_t cycle);

  const std::vector<FaultRecord>& fault_log() const { return fault_log_; }

 private:
  void record_fault(const BusTransaction& txn, BusFault fault, uint64_t cycle);

  MemoryMap map_;
  MainRam& ram_;
  Scratchpad& spm_;
  UartModel& uart_;
  MmioDevice& regs_;
  MmioDevice& perf_;
  std::vector<FaultRecord> fault_log_;
};

}  // namespace npusim

#endif  // NPUSIM_BUS_HPP
