#include "npusim/bus.hpp"

#include <algorithm>

namespace npusim {

const char* bus_fault_name(BusFault fault) {
  switch (fault) {
    case BusFault::None: return "none";
    case BusFault::Unmapped: return "unmapped";
    case BusFault::Misaligned: return "misaligned";
  }
  return "?";
}

std::vector<BusTransaction> arbitrate(std::vector<BusTransaction> pending) {
  std::stable_sort(pending.begin(), pending.end(),
                   [](const BusTransaction& a, const BusTransaction& b) {
                     return a.master == BusMaster::Dma && b.master == BusMaster::Cpu;
                   });
  return pending;
}

void Bus::record_fault(const BusTransaction& txn, BusFault fault, uint64_t cycle) {
  fault_log_.push_back({txn, fault, cycle});
}

BusReply Bus::read32(uint32_t addr, BusMaster master, uint64_t cycle) {
  const BusTransaction txn{addr, BusOp::Read32, 0, master};
  if (addr % 4 != 0) {
    record_fault(txn, BusFault::Misaligned, cycle);
    return {0, BusFault::Misaligned};
  }
  const Region* r = map_.decode(addr);
  if (!r) {
    record_fault(txn, BusFault::Unmapped, cycle);
    return {0, BusFault::Unmapped};
  }
  const uint32_t off = addr - r->base;
  switch (r->kind) {
    case RegionKind::MainRam: return {ram_.read32(off), BusFault::None};
    case RegionKind::Scratchpad: return {spm_.read32(off), BusFault::None};
    case RegionKind::NeuralRegs: return {regs_.mmio_read(off), BusFault::None};
    case RegionKind::PerfCounters: return {perf_.mmio_read(off), BusFault::None};
    case RegionKind::Uart: return {uart_.bus_read(off), BusFault::None};
  }
  return {0, BusFault::Unmapped};
}

BusFault Bus::write32(uint32_t addr, uint32_t data, BusMaster master, uint64_t cycle) {
  const BusTransaction txn{addr, BusOp::Write32, data, master};
  if (addr % 4 != 0) {
    record_fault(txn, BusFault::Misaligned, cycle);
    return BusFault::Misaligned;
  }
  const Region* r = map_.decode(addr);
  if (!r) {
    record_fault(txn, BusFault::Unmapped, cycle);
    return BusFault::Unmapped;
  }
  const uint32_t off = addr - r->base;
  switch (r->kind) {
    case RegionKind::MainRam: ram_.write32(off, data); break;
    case RegionKind::Scratchpad: spm_.write32(off, data); break;
    case RegionKind::NeuralRegs: regs_.mmio_write(off, data); break;
    case RegionKind::PerfCounters: perf_.mmio_write(off, data); break;
    case RegionKind::Uart: uart_.bus_write(off, data); break;
  }
  return BusFault::None;
}

bool Bus::dma_read8(uint32_t addr, uint8_t& out, uint64_t cycle) {
  const Region* r = map_.decode(addr);
  if (!r || (r->kind != RegionKind::MainRam && r->kind != RegionKind::Scratchpad)) {
    record_fault({addr, BusOp::Read32, 0, BusMaster::Dma}, BusFault::Unmapped, cycle);
    return false;
  }
  const uint32_t off = addr - r->base;
  out = r->kind == RegionKind::MainRam ? ram_.read8(off) : spm_.read8(off);
  return true;
}

bool Bus::dma_write8(uint32_t addr, uint8_t v, uint64_t cycle) {
  const Region* r = map_.decode(addr);
  if (!r || (r->kind != RegionKind::MainRam && r->kind != RegionKind::Scratchpad)) {
    record_fault({addr, BusOp::Write32, v, BusMaster::Dma}, BusFault::Unmapped, cycle);
    return false;
  }
  const uint32_t off = addr - r->base;
  if (r->kind == RegionKind::MainRam) {
    ram_.write8(off, v);
  } else {
    spm_.write8(off, v);
  }
  return true;
}

}  // namespace npusim
