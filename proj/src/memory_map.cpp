#include "npusim/memory_map.hpp"

#include <cassert>

namespace npusim {

const char* region_kind_name(RegionKind kind) {
  switch (kind) {
    case RegionKind::MainRam: return "MainRam";
    case RegionKind::NeuralRegs: return "NeuralRegs";
    case RegionKind::Scratchpad: return "Scratchpad";
    case RegionKind::Uart: return "Uart";
    case RegionKind::PerfCounters: return "PerfCounters";
  }
  return "?";
}

MemoryMap::MemoryMap(std::vector<Region> regions) : regions_(std::move(regions)) {
  assert(disjoint());
}

MemoryMap MemoryMap::standard(uint32_t scratchpad_size) {
  using namespace memmap;
  std::vector<Region> r{
      {kMainRamBase, kMainRamLimit, RegionKind::MainRam},
      {kNeuralRegsBase, kNeuralRegsLimit, RegionKind::NeuralRegs},
      {kScratchpadBase, kScratchpadBase + scratchpad_size - 1, RegionKind::Scratchpad},
      {kUartBase, kUartLimit, RegionKind::Uart},
      {kPerfBase, kPerfLimit, RegionKind::PerfCounters},
  };
  return MemoryMap(std::move(r));
}

const Region* MemoryMap::decode(uint32_t addr) const {
  for (const Region& r : regions_) {
    if (r.contains(addr)) return &r;
  }
  return nullptr;
}

bool MemoryMap::disjoint() const {
  for (size_t i = 0; i < regions_.size(); ++i) {
    for (size_t j = i + 1; j < regions_.size(); ++j) {
      const Region& a = regions_[i];
      const Region& b = regions_[j];
      if (a.base <= b.limit && b.base <= a.limit) return false;
    }
  }
  return true;
}

}  // namespace npusim
