#include "npusim/workload.hpp"

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "npusim/kvfile.hpp"
#include "npusim/perf.hpp"
#include "npusim/reference.hpp"
#include "npusim/rng.hpp"

namespace npusim {

namespace {

std::optional<int64_t> kv_to_i64(const std::string& value) {
  if (value.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 0);
  if (errno != 0 || end != value.c_str() + value.size()) return std::nullopt;
  return v;
}

std::string at_line(int line, const std::string& msg) {
  return "line " + std::to_string(line) + ": " + msg;
}

// --- manifest parsing -------------------------------------------------------

struct SectionReader {
  const KvSection& s;
  std::optional<std::string>& err;

  std::optional<std::string> get(const char* key) const {
    const std::string* v = s.find(key);
    if (!v) return std::nullopt;
    return *v;
  }

  uint32_t u32(const char* key, uint32_t fallback) const {
    const std::string* v = s.find(key);
    if (!v) return fallback;
    const auto parsed = kv_to_u32(*v);
    if (!parsed) {
      set_err(key, *v);
      return fallback;
    }
    return *parsed;
  }

  uint64_t u64(const char* key, uint64_t fallback) const {
    const std::string* v = s.find(key);
    if (!v) return fallback;
    const auto parsed = kv_to_u64(*v);
    if (!parsed) {
      set_err(key, *v);
      return fallback;
    }
    return *parsed;
  }

  uint32_t require_u32(const char* key) const {
    const std::string* v = s.find(key);
    if (!v) {
      if (!err) err = at_line(s.line, std::string("missing key `") + key + "`");
      return 0;
    }
    const auto parsed = kv_to_u32(*v);
    if (!parsed) {
      set_err(key, *v);
      return 0;
    }
    return *parsed;
  }

  void set_err(const char* key, const std::string& v) const {
    if (!err) err = at_line(s.line, std::string("bad value for `") + key + "`: " + v);
  }
};

std::optional<DataSpec> parse_data_spec(const std::string& value, int frac_bits) {
  std::istringstream in(value);
  std::string kind;
  in >> kind;
  DataSpec spec;
  if (kind == "zeros") {
    spec.kind = DataKind::Zeros;
  } else if (kind == "random") {
    spec.kind = DataKind::Random;
    uint64_t salt = 0;
    if (in >> salt) spec.seed_salt = salt;
  } else if (kind == "const") {
    spec.kind = DataKind::Const;
    std::string num;
    if (!(in >> num)) return std::nullopt;
    const auto v = kv_to_i64(num);
    if (!v || *v < kFixed16Min || *v > kFixed16Max) return std::nullopt;
    spec.const_value = static_cast<int16_t>(*v);
  } else if (kind == "real") {
    spec.kind = DataKind::Const;
    double v = 0;
    if (!(in >> v)) return std::nullopt;
    spec.const_value = fixed_from_real(v, frac_bits).raw;
  } else if (kind == "file") {
    spec.kind = DataKind::File;
    if (!(in >> spec.path)) return std::nullopt;
  } else {
    return std::nullopt;
  }
  std::string rest;
  if (in >> rest) return std::nullopt;
  return spec;
}

ScaleSpec parse_scale(const SectionReader& r, std::optional<std::string>& err) {
  ScaleSpec scale;
  scale.right_shift = static_cast<uint8_t>(r.u32("shift", 0));
  if (const auto round = r.get("round")) {
    if (*round == "truncate") {
      scale.rounding = Rounding::Truncate;
    } else if (*round == "half-up") {
      scale.rounding = Rounding::HalfUp;
    } else if (!err) {
      err = at_line(r.s.line, "bad value for `round` (truncate|half-up): " + *round);
    }
  }
  return scale;
}

void parse_op(const KvSection& s, WorkloadManifest& m, std::optional<std::string>& err) {
  SectionReader r{s, err};
  WorkloadOp op;
  op.line = s.line;

  const auto data = [&](const char* key, const char* alias) -> DataSpec {
    const std::string* v = s.find(key);
    if (!v && alias) v = s.find(alias);
    if (!v) return DataSpec{};  // random, no salt
    const auto spec = parse_data_spec(*v, m.frac_bits);
    if (!spec) {
      if (!err) err = at_line(s.line, std::string("bad data spec for `") + key + "`: " + *v);
      return DataSpec{};
    }
    return *spec;
  };

  if (s.arg == "gemm") {
    op.kind = Opcode::Gemm;
    op.gemm.m = r.require_u32("m");
    op.gemm.n = r.require_u32("n");
    op.gemm.k = r.require_u32("k");
    op.gemm.a_addr = r.require_u32("a");
    op.gemm.b_addr = r.require_u32("b");
    op.gemm.c_addr = r.require_u32("c");
    op.gemm.scale = parse_scale(r, err);
    op.data_a = data("data_a", nullptr);
    op.data_b = data("data_b", nullptr);
  } else if (s.arg == "conv") {
    op.kind = Opcode::Conv;
    op.conv.in_h = r.require_u32("in_h");
    op.conv.in_w = r.require_u32("in_w");
    op.conv.in_c = r.require_u32("in_c");
    op.conv.out_c = r.require_u32("out_c");
    op.conv.kernel_h = r.require_u32("kernel_h");
    op.conv.kernel_w = r.require_u32("kernel_w");
    op.conv.stride = r.u32("stride", 1);
    op.conv.padding = r.u32("padding", 0);
    op.conv.in_addr = r.require_u32("in");
    op.conv.wgt_addr = r.require_u32("wgt");
    op.conv.out_addr = r.require_u32("out");
    op.conv.scale = parse_scale(r, err);
    op.data_a = data("data_in", "data_a");
    op.data_b = data("data_wgt", "data_b");
  } else if (s.arg == "pool") {
    op.kind = Opcode::Pool;
    if (const auto mode = r.get("mode")) {
      if (*mode == "max") {
        op.pool.mode = PoolMode::Max;
      } else if (*mode == "avg") {
        op.pool.mode = PoolMode::Avg;
      } else if (!err) {
        err = at_line(s.line, "bad value for `mode` (max|avg): " + *mode);
      }
    }
    op.pool.window_h = r.require_u32("window_h");
    op.pool.window_w = r.require_u32("window_w");
    op.pool.stride = r.u32("stride", 1);
    op.pool.in_h = r.require_u32("in_h");
    op.pool.in_w = r.require_u32("in_w");
    op.pool.in_addr = r.require_u32("in");
    op.pool.out_addr = r.require_u32("out");
    op.data_a = data("data_in", "data_a");
  } else if (s.arg == "relu") {
    op.kind = Opcode::Relu;
    op.relu.count = r.require_u32("count");
    op.relu.src_addr = r.require_u32("src");
    op.relu.dst_addr = r.require_u32("dst");
    op.data_a = data("data", "data_a");
  } else if (s.arg == "load" || s.arg == "store") {
    op.kind = s.arg == "load" ? Opcode::Load : Opcode::Store;
    op.transfer.src_addr = r.require_u32("src");
    op.transfer.dst_addr = r.require_u32("dst");
    op.transfer.length = r.require_u32("len");
    op.transfer.stride = r.u32("stride", 0);
    op.data_a = data("data", "data_a");
  } else {
    if (!err) err = at_line(s.line, "unknown op kind `" + s.arg + "`");
    return;
  }
  m.ops.push_back(std::move(op));
}

void apply_engine_section(const KvSection& s, EngineConfig& e,
                          std::optional<std::string>& err) {
  SectionReader r{s, err};
  e.mac_units = r.u32("mac_units", e.mac_units);
  e.scratchpad_size = r.u32("scratchpad_size", e.scratchpad_size);
  e.dma_burst_size = r.u32("dma_burst_size", e.dma_burst_size);
  e.clock_hz = r.u64("clock_hz", e.clock_hz);
  e.setup_cycles = r.u32("setup_cycles", e.setup_cycles);
  e.writeback_beat_bytes = r.u32("writeback_beat_bytes", e.writeback_beat_bytes);
  if (!err && !e.valid()) {
    err = at_line(s.line, "engine config out of range (mac_units 4..32, sizes > 0)");
  }
}

void apply_stall_section(const KvSection& s, StallModel& stall,
                         std::optional<std::string>& err) {
  SectionReader r{s, err};
  stall.seed = r.u64("seed", stall.seed);
  stall.permille = r.u32("permille", stall.permille);
  stall.max_run = r.u32("max_run", stall.max_run);
  if (!err && (stall.permille > 1000 || stall.max_run > 64)) {
    err = at_line(s.line, "stall config out of range (permille <= 1000, max_run <= 64)");
  }
}

// --- execution --------------------------------------------------------------

std::vector<int16_t> make_elements(const DataSpec& spec, uint32_t count, Rng rng,
                                   std::optional<std::string>& err, int line) {
  std::vector<int16_t> v(count, 0);
  switch (spec.kind) {
    case DataKind::Zeros:
      break;
    case DataKind::Const:
      std::fill(v.begin(), v.end(), spec.const_value);
      break;
    case DataKind::Random: {
      Rng stream = rng.fork(spec.seed_salt);
      for (auto& e : v) e = stream.next_i16();
      break;
    }
    case DataKind::File: {
      std::ifstream in(spec.path, std::ios::binary);
      if (!in) {
        if (!err) err = at_line(line, "cannot open data file " + spec.path);
        return v;
      }
      std::vector<char> bytes(size_t{count} * 2, 0);
      in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (in.gcount() < static_cast<std::streamsize>(bytes.size())) {
        if (!err) err = at_line(line, "data file too short: " + spec.path);
        return v;
      }
      for (uint32_t i = 0; i < count; ++i) {
        v[i] = static_cast<int16_t>(
            static_cast<uint16_t>(static_cast<uint8_t>(bytes[2 * i])) |
            static_cast<uint16_t>(static_cast<uint8_t>(bytes[2 * i + 1])) << 8);
      }
      break;
    }
  }
  return v;
}

std::vector<uint8_t> to_bytes(const std::vector<int16_t>& v) {
  std::vector<uint8_t> bytes(v.size() * 2);
  for (size_t i = 0; i < v.size(); ++i) {
    bytes[2 * i] = static_cast<uint8_t>(static_cast<uint16_t>(v[i]));
    bytes[2 * i + 1] = static_cast<uint8_t>(static_cast<uint16_t>(v[i]) >> 8);
  }
  return bytes;
}

std::vector<int16_t> from_bytes(const std::vector<uint8_t>& bytes) {
  std::vector<int16_t> v(bytes.size() / 2);
  for (size_t i = 0; i < v.size(); ++i) {
    v[i] = static_cast<int16_t>(static_cast<uint16_t>(bytes[2 * i]) |
                                static_cast<uint16_t>(bytes[2 * i + 1]) << 8);
  }
  return v;
}

struct RunnerState {
  SocSimulator& sim;
  Logger& log;
  const WorkloadManifest& manifest;
  uint64_t seed;
  uint32_t poll_timeouts = 0;

  // Main-memory staging cursor for compute-op operands (reset per op).
  uint32_t stage_cursor = 0;

  bool stage_to_scratchpad(const std::vector<uint8_t>& bytes, uint32_t spm_offset) {
    if (bytes.empty()) return true;
    if (stage_cursor + bytes.size() > memmap::kMainRamSize) return false;
    const uint32_t src = memmap::kMainRamBase + stage_cursor;
    if (!sim.load_image(src, bytes)) return false;
    stage_cursor += static_cast<uint32_t>(bytes.size());

    DmaDescriptor d{src, memmap::kScratchpadBase + spm_offset,
                    static_cast<uint32_t>(bytes.size()), 0, -1};
    const auto sub = sim.dma_submit(std::span<const DmaDescriptor>(&d, 1), 0);
    if (!sub.ok()) return false;
    const uint64_t bursts =
        (bytes.size() + sim.config().engine.dma_burst_size - 1) /
        sim.config().engine.dma_burst_size;
    const uint64_t budget = bursts * (2 + sim.config().dma_stall.max_run) + 64;
    return sim.dma_drain(sub.ticket, budget) == TransferState::Done;
  }

  bool read_scratchpad(uint32_t spm_offset, std::vector<uint8_t>& out) const {
    return sim.dump_image(memmap::kScratchpadBase + spm_offset, out);
  }
};

uint64_t ceil_div(uint64_t a, uint64_t b) { return (a + b - 1) / b; }

// Generous poll budget derived from the op's own work estimate.
uint64_t poll_budget(const EngineConfig& cfg, const WorkloadOp& op) {
  uint64_t work = 1;
  uint64_t out_bytes = 4;
  switch (op.kind) {
    case Opcode::Gemm:
      work = uint64_t{op.gemm.m} * op.gemm.n * op.gemm.k;
      out_bytes = 2ull * op.gemm.m * op.gemm.n;
      break;
    case Opcode::Conv: {
      const auto oh =
          conv_out_dim(op.conv.in_h, op.conv.kernel_h, op.conv.stride, op.conv.padding);
      const auto ow =
          conv_out_dim(op.conv.in_w, op.conv.kernel_w, op.conv.stride, op.conv.padding);
      if (oh && ow) {
        work = uint64_t{op.conv.out_c} * *oh * *ow * op.conv.in_c * op.conv.kernel_h *
               op.conv.kernel_w;
        out_bytes = 2ull * op.conv.out_c * *oh * *ow;
      }
      break;
    }
    case Opcode::Pool: {
      const auto oh = pool_out_dim(op.pool.in_h, op.pool.window_h, op.pool.stride);
      const auto ow = pool_out_dim(op.pool.in_w, op.pool.window_w, op.pool.stride);
      if (oh && ow) {
        work = uint64_t{*oh} * *ow * op.pool.window_h * op.pool.window_w;
        out_bytes = 2ull * *oh * *ow;
      }
      break;
    }
    case Opcode::Relu:
      work = op.relu.count;
      out_bytes = 2ull * op.relu.count;
      break;
    case Opcode::Load:
    case Opcode::Store:
      work = ceil_div(op.transfer.length, 64) * 8;
      out_bytes = op.transfer.length;
      break;
  }
  return work + cfg.setup_cycles + out_bytes + 4096;
}

std::string shape_string(const WorkloadOp& op) {
  char buf[96];
  switch (op.kind) {
    case Opcode::Gemm:
      std::snprintf(buf, sizeof buf, "%ux%ux%u", op.gemm.m, op.gemm.n, op.gemm.k);
      break;
    case Opcode::Conv:
      std::snprintf(buf, sizeof buf, "%uc%ux%u k%ux%u s%u p%u oc%u", op.conv.in_c,
                    op.conv.in_h, op.conv.in_w, op.conv.kernel_h, op.conv.kernel_w,
                    op.conv.stride, op.conv.padding, op.conv.out_c);
      break;
    case Opcode::Pool:
      std::snprintf(buf, sizeof buf, "%s %ux%u w%ux%u s%u",
                    op.pool.mode == PoolMode::Max ? "max" : "avg", op.pool.in_h,
                    op.pool.in_w, op.pool.window_h, op.pool.window_w, op.pool.stride);
      break;
    case Opcode::Relu:
      std::snprintf(buf, sizeof buf, "n%u", op.relu.count);
      break;
    case Opcode::Load:
    case Opcode::Store:
      std::snprintf(buf, sizeof buf, "len%u stride%u", op.transfer.length,
                    op.transfer.stride);
      break;
  }
  return buf;
}

std::string lower_opcode(Opcode op) {
  std::string s = opcode_name(op);
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Program the parameter registers for one op and return the control word.
uint32_t program_registers(SocSimulator& sim, const WorkloadOp& op) {
  const uint32_t base = memmap::kNeuralRegsBase;
  const auto wr = [&](uint32_t off, uint32_t v) { sim.cpu_write32(base + off, v); };
  switch (op.kind) {
    case Opcode::Gemm:
      wr(reg::DIM0, op.gemm.m);
      wr(reg::DIM1, op.gemm.n);
      wr(reg::DIM2, op.gemm.k);
      wr(reg::ADDR_A, op.gemm.a_addr);
      wr(reg::ADDR_B, op.gemm.b_addr);
      wr(reg::ADDR_C, op.gemm.c_addr);
      wr(reg::SCALE, scale_to_word(op.gemm.scale));
      break;
    case Opcode::Conv:
      wr(reg::DIM0, op.conv.in_h);
      wr(reg::DIM1, op.conv.in_w);
      wr(reg::DIM2, op.conv.in_c);
      wr(reg::ADDR_A, op.conv.in_addr);
      wr(reg::ADDR_B, op.conv.wgt_addr);
      wr(reg::ADDR_C, op.conv.out_addr);
      wr(reg::SCALE, scale_to_word(op.conv.scale));
      wr(reg::PARAM0, op.conv.out_c);
      wr(reg::PARAM1, op.conv.kernel_h);
      wr(reg::PARAM2, op.conv.kernel_w);
      wr(reg::PARAM3, op.conv.stride);
      wr(reg::PARAM4, op.conv.padding);
      break;
    case Opcode::Pool:
      wr(reg::DIM0, op.pool.in_h);
      wr(reg::DIM1, op.pool.in_w);
      wr(reg::ADDR_A, op.pool.in_addr);
      wr(reg::ADDR_C, op.pool.out_addr);
      wr(reg::PARAM0, op.pool.mode == PoolMode::Max ? 0 : 1);
      wr(reg::PARAM1, op.pool.window_h);
      wr(reg::PARAM2, op.pool.window_w);
      wr(reg::PARAM3, op.pool.stride);
      break;
    case Opcode::Relu:
      wr(reg::DIM0, op.relu.count);
      wr(reg::ADDR_A, op.relu.src_addr);
      wr(reg::ADDR_C, op.relu.dst_addr);
      break;
    case Opcode::Load:
    case Opcode::Store:
      wr(reg::DIM0, op.transfer.length);
      wr(reg::ADDR_A, op.transfer.src_addr);
      wr(reg::ADDR_C, op.transfer.dst_addr);
      wr(reg::PARAM3, op.transfer.stride);
      break;
  }
  return static_cast<uint32_t>(op.kind) | reg::CTRL_START;
}

}  // namespace

WorkloadParseResult parse_workload_text(const std::string& text,
                                        const EngineConfig& base_engine,
                                        const StallModel& base_stall) {
  WorkloadParseResult result;
  result.manifest.engine = base_engine;
  result.manifest.stall = base_stall;
  const KvParseResult kv = parse_kv_text(text);
  if (!kv.ok()) {
    result.error = at_line(kv.error->line, kv.error->message);
    return result;
  }

  WorkloadManifest& m = result.manifest;
  for (const KvSection& s : kv.doc.sections) {
    if (s.name == "workload") {
      SectionReader r{s, result.error};
      if (const auto name = r.get("name")) m.name = *name;
      if (const auto oc = r.get("oracle_check")) {
        const auto b = kv_to_bool(*oc);
        if (!b) {
          result.error = at_line(s.line, "bad value for `oracle_check`: " + *oc);
        } else {
          m.oracle_check = *b;
        }
      }
      m.frac_bits = static_cast<int>(r.u32("frac_bits", kDefaultFracBits));
    } else if (s.name == "engine") {
      apply_engine_section(s, m.engine, result.error);
    } else if (s.name == "stall") {
      apply_stall_section(s, m.stall, result.error);
    } else if (s.name == "op") {
      parse_op(s, m, result.error);
    } else {
      result.error = at_line(s.line, "unknown section `" + s.name + "`");
    }
    if (result.error) return result;
  }
  return result;
}

WorkloadParseResult parse_workload_file(const std::string& path,
                                        const EngineConfig& base_engine,
                                        const StallModel& base_stall) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    WorkloadParseResult r;
    r.error = "cannot open " + path;
    return r;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_workload_text(ss.str(), base_engine, base_stall);
}

std::optional<std::string> apply_config_file(const std::string& path,
                                             EngineConfig& engine, StallModel& stall) {
  const KvParseResult kv = parse_kv_file(path);
  if (!kv.ok()) return at_line(kv.error->line, kv.error->message);
  std::optional<std::string> err;
  for (const KvSection& s : kv.doc.sections) {
    if (s.name == "engine") {
      apply_engine_section(s, engine, err);
    } else if (s.name == "stall") {
      apply_stall_section(s, stall, err);
    } else {
      err = at_line(s.line, "unknown section `" + s.name + "`");
    }
    if (err) return err;
  }
  return std::nullopt;
}

uint32_t RunReport::fault_count() const {
  uint32_t n = 0;
  for (const auto& op : ops) n += op.fault ? 1 : 0;
  return n;
}

uint32_t RunReport::oracle_failures() const {
  uint32_t n = 0;
  for (const auto& op : ops) n += op.oracle == OpReport::Oracle::Fail ? 1 : 0;
  return n;
}

int RunReport::exit_status() const {
  return (oracle_failures() || poll_timeouts) ? 1 : 0;
}

std::string RunReport::to_text() const {
  std::string out;
  char line[192];
  const auto put = [&](const char* fmt, auto... args) {
    std::snprintf(line, sizeof line, fmt, args...);
    out += line;
    out += '\n';
  };

  put("report.version = %d", 1);
  put("workload.name = %s", workload_name.c_str());
  put("workload.seed = %llu", static_cast<unsigned long long>(seed));
  put("workload.oracle_check = %s", oracle_check ? "on" : "off");
  put("config.mac_units = %u", engine.mac_units);
  put("config.scratchpad_size = %u", engine.scratchpad_size);
  put("config.dma_burst_size = %u", engine.dma_burst_size);
  put("config.data_width = %u", engine.data_width);
  put("config.addr_width = %u", engine.addr_width);
  put("config.clock_hz = %llu", static_cast<unsigned long long>(engine.clock_hz));
  put("config.setup_cycles = %u", engine.setup_cycles);
  put("config.writeback_beat_bytes = %u", engine.writeback_beat_bytes);
  put("stall.seed = %llu", static_cast<unsigned long long>(stall.seed));
  put("stall.permille = %u", stall.permille);
  put("stall.max_run = %u", stall.max_run);

  for (size_t i = 0; i < ops.size(); ++i) {
    const OpReport& op = ops[i];
    put("op[%zu].kind = %s", i, op.kind.c_str());
    put("op[%zu].shape = %s", i, op.shape.c_str());
    put("op[%zu].status = %s", i, op.fault ? "fault" : "ok");
    if (op.fault) {
      put("op[%zu].fault_reason = %s", i, op.fault_reason.c_str());
      continue;
    }
    put("op[%zu].cycles_compute = %llu", i,
        static_cast<unsigned long long>(op.result.cycles_compute));
    put("op[%zu].cycles_total = %llu", i,
        static_cast<unsigned long long>(op.result.cycles_total));
    put("op[%zu].min_cycles = %llu", i, static_cast<unsigned long long>(op.min_cycles));
    put("op[%zu].efficiency = %.6f", i, op.efficiency);
    put("op[%zu].efficiency_anomaly = %s", i, op.efficiency_anomaly ? "yes" : "no");
    put("op[%zu].overflow_count = %u", i, op.result.overflow_count);
    put("op[%zu].mac_ops = %llu", i, static_cast<unsigned long long>(op.result.mac_ops));
    put("op[%zu].oracle = %s", i,
        op.oracle == OpReport::Oracle::Off
            ? "off"
            : (op.oracle == OpReport::Oracle::Pass ? "pass" : "fail"));
  }

  put("counters.total_cycles = %llu",
      static_cast<unsigned long long>(counters.total_cycles));
  put("counters.engine_busy_cycles = %llu",
      static_cast<unsigned long long>(counters.engine_busy_cycles));
  put("counters.mac_ops_retired = %llu",
      static_cast<unsigned long long>(counters.mac_ops_retired));
  put("counters.dma_bytes_moved = %llu",
      static_cast<unsigned long long>(counters.dma_bytes_moved));
  put("counters.cpu_stall_cycles = %llu",
      static_cast<unsigned long long>(counters.cpu_stall_cycles));

  const PerfModel two{engine.mac_units, engine.clock_hz, 2};
  const PerfModel one{engine.mac_units, engine.clock_hz, 1};
  put("throughput.peak_ops_per_sec.macx2 = %llu",
      static_cast<unsigned long long>(peak_ops_per_sec(two)));
  put("throughput.peak_ops_per_sec.macx1 = %llu",
      static_cast<unsigned long long>(peak_ops_per_sec(one)));
  if (counters.total_cycles > 0) {
    const double seconds = static_cast<double>(counters.total_cycles) /
                           static_cast<double>(engine.clock_hz);
    const double macs_per_sec = static_cast<double>(counters.mac_ops_retired) / seconds;
    put("throughput.achieved_ops_per_sec.macx2 = %.1f", 2.0 * macs_per_sec);
    put("throughput.achieved_ops_per_sec.macx1 = %.1f", macs_per_sec);
  } else {
    put("throughput.achieved_ops_per_sec.macx2 = %.1f", 0.0);
    put("throughput.achieved_ops_per_sec.macx1 = %.1f", 0.0);
  }

  uint32_t anomalies = 0;
  for (const auto& op : ops) anomalies += op.efficiency_anomaly ? 1 : 0;
  put("summary.ops = %zu", ops.size());
  put("summary.faults = %u", fault_count());
  put("summary.oracle_failures = %u", oracle_failures());
  put("summary.poll_timeouts = %u", poll_timeouts);
  put("summary.efficiency_anomalies = %u", anomalies);
  put("summary.exit_status = %d", exit_status());
  return out;
}

RunReport run_workload(const WorkloadManifest& manifest, uint64_t seed, Logger& log) {
  RunReport report;
  report.workload_name = manifest.name;
  report.seed = seed;
  report.oracle_check = manifest.oracle_check;
  report.engine = manifest.engine;
  report.stall = manifest.stall;

  SocSimulator sim(SocConfig{manifest.engine, manifest.stall});
  RunnerState st{sim, log, manifest, seed};
  const Rng base(seed);

  for (size_t index = 0; index < manifest.ops.size(); ++index) {
    const WorkloadOp& op = manifest.ops[index];
    OpReport entry;
    entry.kind = lower_opcode(op.kind);
    entry.shape = shape_string(op);
    std::optional<std::string> err;
    st.stage_cursor = 0;

    log.info("op[%zu] %s %s", index, entry.kind.c_str(), entry.shape.c_str());

    // Stage operands. Element streams are derived from (seed, op index,
    // operand slot, manifest salt) so a manifest replays identically.
    const Rng rng_a = base.fork(2 * index);
    const Rng rng_b = base.fork(2 * index + 1);
    std::vector<int16_t> in_a;
    std::vector<int16_t> in_b;
    bool staged = true;

    switch (op.kind) {
      case Opcode::Gemm:
        in_a = make_elements(op.data_a, op.gemm.m * op.gemm.k, rng_a, err, op.line);
        in_b = make_elements(op.data_b, op.gemm.k * op.gemm.n, rng_b, err, op.line);
        staged = st.stage_to_scratchpad(to_bytes(in_a), op.gemm.a_addr) &&
                 st.stage_to_scratchpad(to_bytes(in_b), op.gemm.b_addr);
        break;
      case Opcode::Conv:
        in_a = make_elements(op.data_a, op.conv.in_c * op.conv.in_h * op.conv.in_w,
                             rng_a, err, op.line);
        in_b = make_elements(op.data_b,
                             op.conv.out_c * op.conv.in_c * op.conv.kernel_h *
                                 op.conv.kernel_w,
                             rng_b, err, op.line);
        staged = st.stage_to_scratchpad(to_bytes(in_a), op.conv.in_addr) &&
                 st.stage_to_scratchpad(to_bytes(in_b), op.conv.wgt_addr);
        break;
      case Opcode::Pool:
        in_a = make_elements(op.data_a, op.pool.in_h * op.pool.in_w, rng_a, err, op.line);
        staged = st.stage_to_scratchpad(to_bytes(in_a), op.pool.in_addr);
        break;
      case Opcode::Relu:
        in_a = make_elements(op.data_a, op.relu.count, rng_a, err, op.line);
        staged = st.stage_to_scratchpad(to_bytes(in_a), op.relu.src_addr);
        break;
      case Opcode::Load:
      case Opcode::Store: {
        // Fill the full strided source span so every burst reads staged data.
        const auto bursts = segment(op.transfer, manifest.engine.dma_burst_size);
        uint32_t span = 0;
        for (const Burst& b : bursts) {
          span = std::max(span, b.src + b.len - op.transfer.src_addr);
        }
        in_a = make_elements(op.data_a, (span + 1) / 2, rng_a, err, op.line);
        auto bytes = to_bytes(in_a);
        bytes.resize(span);
        staged = sim.load_image(op.transfer.src_addr, bytes);
        break;
      }
    }

    if (err || !staged) {
      entry.fault = true;
      entry.fault_reason = err ? *err : "staging failed";
      log.error("op[%zu] %s", index, entry.fault_reason.c_str());
      report.ops.push_back(std::move(entry));
      continue;
    }

    // Program, start, poll.
    const uint32_t control = program_registers(sim, op);
    sim.cpu_write32(memmap::kNeuralRegsBase + reg::CONTROL, control);
    const uint32_t status0 =
        sim.cpu_read32(memmap::kNeuralRegsBase + reg::STATUS).data;
    if (status0 & reg::STATUS_ERR) {
      entry.fault = true;
      entry.fault_reason = "start rejected (parameter fault)";
      log.error("op[%zu] start rejected", index);
      report.ops.push_back(std::move(entry));
      continue;
    }

    const auto poll =
        sim.cpu_poll32(memmap::kNeuralRegsBase + reg::STATUS, reg::STATUS_STATE_MASK,
                       reg::STATUS_DONE, poll_budget(manifest.engine, op));
    if (!poll.matched) {
      entry.fault = true;
      entry.fault_reason = "poll timeout";
      ++report.poll_timeouts;
      log.error("op[%zu] poll timeout", index);
      report.ops.push_back(std::move(entry));
      continue;
    }
    if (poll.last_value & reg::STATUS_ERR) {
      entry.fault = true;
      entry.fault_reason = "completed with error flag";
      log.error("op[%zu] completed with error flag", index);
      report.ops.push_back(std::move(entry));
      continue;
    }

    entry.result = sim.last_op_result().value_or(OpResult{});
    entry.min_cycles = entry.result.cycles_compute;
    if (op.kind == Opcode::Gemm) {
      entry.min_cycles =
          min_cycles_gemm(op.gemm.m, op.gemm.n, op.gemm.k, manifest.engine.mac_units);
      const Efficiency e =
          efficiency(entry.result.cycles_total, op.gemm.m, op.gemm.n, op.gemm.k,
                     manifest.engine.mac_units);
      entry.efficiency = e.ratio;
      entry.efficiency_anomaly = e.anomaly;
    } else if (entry.result.cycles_total > 0) {
      entry.efficiency = static_cast<double>(entry.min_cycles) /
                         static_cast<double>(entry.result.cycles_total);
      entry.efficiency_anomaly = entry.result.cycles_total < entry.min_cycles;
    }

    // Oracle check against the plain wide-integer references.
    if (manifest.oracle_check) {
      bool pass = true;
      bool checked = true;
      switch (op.kind) {
        case Opcode::Gemm: {
          const auto expect = ref::gemm(op.gemm, in_a, in_b);
          std::vector<uint8_t> got(expect.size() * 2);
          pass = st.read_scratchpad(op.gemm.c_addr, got) && from_bytes(got) == expect;
          break;
        }
        case Opcode::Conv: {
          const auto expect = ref::conv(op.conv, in_a, in_b);
          std::vector<uint8_t> got(expect.size() * 2);
          pass = st.read_scratchpad(op.conv.out_addr, got) && from_bytes(got) == expect;
          break;
        }
        case Opcode::Pool: {
          const auto expect = ref::pool(op.pool, in_a);
          std::vector<uint8_t> got(expect.size() * 2);
          pass = st.read_scratchpad(op.pool.out_addr, got) && from_bytes(got) == expect;
          break;
        }
        case Opcode::Relu: {
          const auto expect = ref::relu(in_a);
          std::vector<uint8_t> got(expect.size() * 2);
          pass = st.read_scratchpad(op.relu.dst_addr, got) && from_bytes(got) == expect;
          break;
        }
        case Opcode::Load:
        case Opcode::Store: {
          // Destination must equal the gathered source bytes.
          const auto bursts = segment(op.transfer, manifest.engine.dma_burst_size);
          for (const Burst& b : bursts) {
            for (uint32_t i = 0; i < b.len && pass; ++i) {
              std::vector<uint8_t> s(1), d(1);
              pass = sim.dump_image(b.src + i, s) && sim.dump_image(b.dst + i, d) &&
                     s[0] == d[0];
            }
          }
          break;
        }
        default:
          checked = false;
      }
      entry.oracle = !checked ? OpReport::Oracle::Off
                              : (pass ? OpReport::Oracle::Pass : OpReport::Oracle::Fail);
      if (entry.oracle == OpReport::Oracle::Fail) {
        log.error("op[%zu] oracle mismatch", index);
      }
    }

    log.debug("op[%zu] cycles_compute=%llu cycles_total=%llu", index,
              static_cast<unsigned long long>(entry.result.cycles_compute),
              static_cast<unsigned long long>(entry.result.cycles_total));
    report.ops.push_back(std::move(entry));
  }

  report.counters = sim.perf();
  return report;
}

}  // namespace npusim
