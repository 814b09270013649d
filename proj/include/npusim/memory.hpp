#ifndef NPUSIM_MEMORY_HPP
#define NPUSIM_MEMORY_HPP

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

namespace npusim {

// Flat little-endian byte store backing the RAM-like regions. Offsets are
// region-relative; callers bound-check against size() before access.
class ByteMemory {
 public:
  explicit ByteMemory(uint32_t size) : bytes_(size, 0) {}

  uint32_t size() const { return static_cast<uint32_t>(bytes_.size()); }

  uint8_t read8(uint32_t offset) const { return bytes_[offset]; }
  void write8(uint32_t offset, uint8_t v) { bytes_[offset] = v; }

  uint32_t read32(uint32_t offset) const {
    return static_cast<uint32_t>(bytes_[offset]) |
           static_cast<uint32_t>(bytes_[offset + 1]) << 8 |
           static_cast<uint32_t>(bytes_[offset + 2]) << 16 |
           static_cast<uint32_t>(bytes_[offset + 3]) << 24;
  }

  void write32(uint32_t offset, uint32_t word) {
    bytes_[offset] = static_cast<uint8_t>(word);
    bytes_[offset + 1] = static_cast<uint8_t>(word >> 8);
    bytes_[offset + 2] = static_cast<uint8_t>(word >> 16);
    bytes_[offset + 3] = static_cast<uint8_t>(word >> 24);
  }

  std::span<const uint8_t> bytes() const { return bytes_; }
  std::span<uint8_t> bytes() { return bytes_; }

 private:
  std::vector<uint8_t> bytes_;
};

// 16 KB main memory. Stands in for the DDR side of DMA transfers at desk
// scale; the map defines no separate DDR window.
class MainRam : public ByteMemory {
 public:
  MainRam() : ByteMemory(16384) {}
};

// Dual-port neural SRAM: one engine port (16-bit element accessors used by
// the operation executors and the PCPI parameter fetch) and one bus port
// (32-bit MMIO and the DMA byte path).
//
// Port ordering within a modeled cycle: bus-port writes are applied before
// engine-port reads, so a same-address same-cycle pair resolves write-first
// (the reader observes the new value). Accesses to different addresses are
// independent, as on real dual-port BRAM.
class Scratchpad : public ByteMemory {
 public:
  explicit Scratchpad(uint32_t size = 8192) : ByteMemory(size) {}

  // Engine port, byte offsets, 2-byte elements.
  int16_t load_i16(uint32_t offset) const {
    return static_cast<int16_t>(static_cast<uint16_t>(read8(offset)) |
                                static_cast<uint16_t>(read8(offset + 1)) << 8);
  }
  void store_i16(uint32_t offset, int16_t v) {
    write8(offset, static_cast<uint8_t>(static_cast<uint16_t>(v)));
    write8(offset + 1, static_cast<uint8_t>(static_cast<uint16_t>(v) >> 8));
  }
};

// Timing-free serial port: one bus write queues one TX byte, one bus read
// pops one RX byte (0 when empty). Only window offset 0x00 is the data
// register; the rest of the window is reserved.
struct UartModel {
  std::vector<uint8_t> tx_sink;
  std::deque<uint8_t> rx_source;

  void bus_write(uint32_t offset, uint32_t word) {
    if (offset == 0) tx_sink.push_back(static_cast<uint8_t>(word));
  }

  uint32_t bus_read(uint32_t offset) {
    if (offset != 0 || rx_source.empty()) return 0;
    uint32_t v = rx_source.front();
    rx_source.pop_front();
    return v;
  }
};

}  // namespace npusim

#endif  // NPUSIM_MEMORY_HPP
