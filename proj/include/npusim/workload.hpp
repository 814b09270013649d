#ifndef NPUSIM_WORKLOAD_HPP
#define NPUSIM_WORKLOAD_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "npusim/dma.hpp"
#include "npusim/log.hpp"
#include "npusim/neural_engine.hpp"
#include "npusim/register_file.hpp"
#include "npusim/soc.hpp"

namespace npusim {

// ---------------------------------------------------------------------------
// Workload manifests: a sectioned key-value document naming engine config
// overrides and a list of operations with data sources. Grammar and key
// tables in docs/file_formats.md.
// ---------------------------------------------------------------------------

enum class DataKind : uint8_t { Zeros, Random, Const, File };

struct DataSpec {
  DataKind kind = DataKind::Random;
  int16_t const_value = 0;
  uint64_t seed_salt = 0;      // extra salt for `random <salt>`
  std::string path;            // for `file <path>`
};

struct WorkloadOp {
  Opcode kind = Opcode::Gemm;
  GemmParams gemm;
  ConvParams conv;
  PoolParams pool;
  ReluParams relu;
  DmaDescriptor transfer;      // LOAD/STORE
  DataSpec data_a;             // A / input
  DataSpec data_b;             // B / weights
  int line = 0;
};

struct WorkloadManifest {
  std::string name = "workload";
  bool oracle_check = true;
  int frac_bits = kDefaultFracBits;
  EngineConfig engine;
  StallModel stall;
  std::vector<WorkloadOp> ops;
};

struct WorkloadParseResult {
  WorkloadManifest manifest;
  std::optional<std::string> error;  // message with line info
  bool ok() const { return !error.has_value(); }
};

// The manifest's own engine/stall sections override the supplied base
// (which is how --config layers under a manifest).
WorkloadParseResult parse_workload_text(const std::string& text,
                                        const EngineConfig& base_engine = {},
                                        const StallModel& base_stall = {});
WorkloadParseResult parse_workload_file(const std::string& path,
                                        const EngineConfig& base_engine = {},
                                        const StallModel& base_stall = {});

// Apply `engine { ... }` / `stall { ... }` sections of a config file onto a
// manifest-independent base (the --config mechanism).
std::optional<std::string> apply_config_file(const std::string& path,
                                             EngineConfig& engine,
                                             StallModel& stall);

// ---------------------------------------------------------------------------
// Execution and reporting.
// ---------------------------------------------------------------------------

struct OpReport {
  std::string kind;
  std::string shape;
  bool fault = false;
  std::string fault_reason;
  OpResult result;
  uint64_t min_cycles = 0;
  double efficiency = 0.0;
  bool efficiency_anomaly = false;
  enum class Oracle : uint8_t { Off, Pass, Fail } oracle = Oracle::Off;
};

struct RunReport {
  std::string workload_name;
  uint64_t seed = 0;
  bool oracle_check = false;
  EngineConfig engine;
  StallModel stall;
  std::vector<OpReport> ops;
  PerfCounters counters;
  uint32_t poll_timeouts = 0;

  uint32_t fault_count() const;
  uint32_t oracle_failures() const;
  int exit_status() const;

  // Deterministic key=value rendering: identical runs produce identical
  // bytes (the replay contract).
  std::string to_text() const;
};

// Stages inputs into main memory and through the DMA into the scratchpad,
// programs the registers, starts and polls each operation, then gathers
// results, counters and oracle verdicts.
RunReport run_workload(const WorkloadManifest& manifest, uint64_t seed, Logger& log);

}  // namespace npusim

#endif  // NPUSIM_WORKLOAD_HPP
