#ifndef NPUSIM_MEMORY_MAP_HPP
#define NPUSIM_MEMORY_MAP_HPP

#include <cstdint>
#include <vector>

namespace npusim {

// ---------------------------------------------------------------------------
// System memory map.
//
//   0x00000000 - 0x00003FFF   RAM            16 KB main memory
//   0x10000000 - 0x100000FF   Neural Regs    engine control/status
//   0x10001000 - 0x10002FFF   Scratchpad     8 KB neural SRAM
//   0x20000000 - 0x200000FF   UART           serial communication
//   0x30000000 - 0x300000FF   Perf Counters  instrumentation
//
// Region limits are inclusive. Every other address is a bus fault.
// ---------------------------------------------------------------------------

namespace memmap {
inline constexpr uint32_t kMainRamBase = 0x00000000u;
inline constexpr uint32_t kMainRamLimit = 0x00003FFFu;
inline constexpr uint32_t kNeuralRegsBase = 0x10000000u;
inline constexpr uint32_t kNeuralRegsLimit = 0x100000FFu;
inline constexpr uint32_t kScratchpadBase = 0x10001000u;
inline constexpr uint32_t kScratchpadLimit = 0x10002FFFu;
inline constexpr uint32_t kUartBase = 0x20000000u;
inline constexpr uint32_t kUartLimit = 0x200000FFu;
inline constexpr uint32_t kPerfBase = 0x30000000u;
inline constexpr uint32_t kPerfLimit = 0x300000FFu;

inline constexpr uint32_t kMainRamSize = kMainRamLimit - kMainRamBase + 1;  // 16384
}  // namespace memmap

enum class RegionKind : uint8_t {
  MainRam,
  NeuralRegs,
  Scratchpad,
  Uart,
  PerfCounters,
};

const char* region_kind_name(RegionKind kind);

struct Region {
  uint32_t base = 0;
  uint32_t limit = 0;  // inclusive
  RegionKind kind = RegionKind::MainRam;

  bool contains(uint32_t addr) const { return addr >= base && addr <= limit; }
  uint32_t size() const { return limit - base + 1; }
};

class MemoryMap {
 public:
  MemoryMap() = default;
  explicit MemoryMap(std::vector<Region> regions);

  // The default map above. A non-default scratchpad size resizes that window
  // in place (base fixed at 0x10001000).
  static MemoryMap standard(uint32_t scratchpad_size = 8192);

  // Unique region containing addr, or nullptr (bus fault).
  const Region* decode(uint32_t addr) const;

  const std::vector<Region>& regions() const { return regions_; }

  bool disjoint() const;  // pairwise-disjointness invariant

 private:
  std::vector<Region> regions_;
};

}  // namespace npusim

#endif  // NPUSIM_MEMORY_MAP_HPP
