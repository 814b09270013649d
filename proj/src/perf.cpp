#include "npusim/perf.hpp"

#include <cassert>

namespace npusim {

uint32_t PerfCounters::mmio_read(uint32_t offset) {
  const uint64_t values[5] = {total_cycles, engine_busy_cycles, mac_ops_retired,
                              dma_bytes_moved, cpu_stall_cycles};
  const uint32_t index = offset / 8;
  if (offset % 4 != 0 || index >= 5) return 0;
  const uint64_t v = values[index];
  return (offset % 8 == 0) ? static_cast<uint32_t>(v)
                           : static_cast<uint32_t>(v >> 32);
}

uint64_t peak_ops_per_sec(const PerfModel& model) {
  assert(model.valid());
  return uint64_t{model.mac_units} * model.clock_hz * model.ops_per_mac;
}

uint64_t min_cycles_gemm(uint64_t m, uint64_t n, uint64_t k, uint64_t mac_units) {
  assert(m > 0 && n > 0 && k > 0 && mac_units > 0);
  const uint64_t work = m * n * k;
  return (work + mac_units - 1) / mac_units;
}

Efficiency efficiency(uint64_t measured_cycles, uint64_t m, uint64_t n, uint64_t k,
                      uint64_t mac_units) {
  assert(measured_cycles > 0);
  const uint64_t floor_cycles = min_cycles_gemm(m, n, k, mac_units);
  Efficiency e;
  e.ratio = static_cast<double>(floor_cycles) / static_cast<double>(measured_cycles);
  e.anomaly = measured_cycles < floor_cycles;
  return e;
}

}  // namespace npusim
