#include "npusim/register_file.hpp"

#include <cctype>
#include <cstdio>

namespace npusim {

const char* opcode_name(Opcode op) {
  switch (op) {
    case Opcode::Gemm: return "GEMM";
    case Opcode::Conv: return "CONV";
    case Opcode::Pool: return "POOL";
    case Opcode::Relu: return "RELU";
    case Opcode::Load: return "LOAD";
    case Opcode::Store: return "STORE";
  }
  return "?";
}

std::optional<Opcode> opcode_from_bits(uint32_t bits) {
  if (bits >= 0x1 && bits <= 0x6) return static_cast<Opcode>(bits);
  return std::nullopt;
}

std::optional<Opcode> opcode_from_name(const std::string& name) {
  std::string up;
  up.reserve(name.size());
  for (char c : name) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  for (uint32_t bits = 0x1; bits <= 0x6; ++bits) {
    const Opcode op = static_cast<Opcode>(bits);
    if (up == opcode_name(op)) return op;
  }
  return std::nullopt;
}

ScaleSpec scale_from_word(uint32_t word) {
  ScaleSpec s;
  s.right_shift = static_cast<uint8_t>(word & reg::SCALE_SHIFT_MASK);
  s.rounding = (word & reg::SCALE_ROUND_HALF_UP) ? Rounding::HalfUp : Rounding::Truncate;
  s.saturate = true;
  return s;
}

uint32_t scale_to_word(const ScaleSpec& scale) {
  uint32_t w = scale.right_shift & reg::SCALE_SHIFT_MASK;
  if (scale.rounding == Rounding::HalfUp) w |= reg::SCALE_ROUND_HALF_UP;
  return w;
}

std::string decode_status_word(uint32_t word) {
  std::string s;
  switch (word & reg::STATUS_STATE_MASK) {
    case reg::STATUS_IDLE: s = "IDLE"; break;
    case reg::STATUS_DONE: s = "DONE"; break;
    case reg::STATUS_BUSY: s = "BUSY"; break;
    default: s = "BAD"; break;
  }
  if (word & reg::STATUS_ERR) s += " | ERR";
  return s;
}

std::string decode_control_word(uint32_t word) {
  std::string s;
  if (auto op = opcode_from_bits(word & reg::CTRL_OP_MASK)) {
    s = opcode_name(*op);
  } else {
    char buf[16];
    std::snprintf(buf, sizeof buf, "OP%u", word & reg::CTRL_OP_MASK);
    s = buf;
  }
  if (word & reg::CTRL_START) s += " | START";
  return s;
}

uint32_t RegisterFile::status_word() const {
  uint32_t w = 0;
  switch (state_) {
    case EngineState::Idle: w = reg::STATUS_IDLE; break;
    case EngineState::Busy: w = reg::STATUS_BUSY; break;
    case EngineState::Done: w = reg::STATUS_DONE; break;
  }
  if (error_) w |= reg::STATUS_ERR;
  return w;
}

uint32_t RegisterFile::param(uint32_t offset) const {
  return params_[(offset - reg::PARAM_BASE) / 4];
}

uint32_t RegisterFile::mmio_read(uint32_t offset) {
  if (offset == reg::STATUS) return status_word();
  if (offset == reg::CONTROL) return latched_opcode_bits_;  // START is W1P, reads 0
  if (offset == reg::CYCLE_COUNT) return cycle_count_;
  if (offset >= reg::PARAM_BASE && offset < reg::PARAM_BASE + 4 * reg::PARAM_WORDS) {
    return param(offset);
  }
  return 0;  // reserved
}

void RegisterFile::mmio_write(uint32_t offset, uint32_t word) {
  if (offset == reg::STATUS || offset == reg::CYCLE_COUNT) return;  // read-only
  if (offset == reg::CONTROL) {
    write_control(word);
    return;
  }
  if (offset >= reg::PARAM_BASE && offset < reg::PARAM_BASE + 4 * reg::PARAM_WORDS) {
    if (state_ == EngineState::Busy) {
      error_ = true;  // parameters are locked while an operation runs
      return;
    }
    params_[(offset - reg::PARAM_BASE) / 4] = word;
    return;
  }
  // reserved: ignored
}

void RegisterFile::write_control(uint32_t word) {
  const uint32_t op_bits = word & reg::CTRL_OP_MASK;
  if (!(word & reg::CTRL_START)) {
    if (state_ == EngineState::Busy) {
      error_ = true;
      return;
    }
    latched_opcode_bits_ = op_bits;
    return;
  }
  if (state_ == EngineState::Busy) {
    error_ = true;  // START while BUSY: ignored
    return;
  }
  const auto op = opcode_from_bits(op_bits);
  if (!op) {
    error_ = true;  // undefined opcode
    return;
  }
  StartEvent ev{*op, params_};
  if (validator_ && !validator_(ev)) {
    error_ = true;  // rejected parameters; state unchanged
    return;
  }
  latched_opcode_bits_ = op_bits;
  error_ = false;
  state_ = EngineState::Busy;
  pending_start_ = ev;
}

std::optional<StartEvent> RegisterFile::take_start() {
  auto ev = pending_start_;
  pending_start_.reset();
  return ev;
}

void RegisterFile::step_state(bool engine_done, uint32_t cycles_total) {
  if (state_ == EngineState::Busy && engine_done) {
    state_ = EngineState::Done;
    cycle_count_ = cycles_total;
  }
}

std::string register_reference_text() {
  struct Row {
    uint32_t offset;
    const char* name;
    const char* access;
    uint32_t reset;
    const char* role;
  };
  static const Row rows[] = {
      {reg::STATUS, "STATUS", "RO", 0x00000001, "state code | error flag (bit 31)"},
      {reg::CONTROL, "CONTROL", "RW", 0x00000000, "[3:0] opcode, [4] START (W1P)"},
      {reg::DIM0, "DIM0", "RW", 0, "gemm m | conv in_h | pool in_h | relu count | ld/st length"},
      {reg::DIM1, "DIM1", "RW", 0, "gemm n | conv in_w | pool in_w"},
      {reg::DIM2, "DIM2", "RW", 0, "gemm k | conv in_c"},
      {reg::ADDR_A, "ADDR_A", "RW", 0, "gemm A | conv input | pool input | relu src | ld/st src"},
      {reg::ADDR_B, "ADDR_B", "RW", 0, "gemm B | conv weights"},
      {reg::ADDR_C, "ADDR_C", "RW", 0, "gemm C | conv output | pool output | relu dst | ld/st dst"},
      {reg::SCALE, "SCALE", "RW", 0, "[5:0] right shift, [8] round-half-up"},
      {reg::PARAM0, "PARAM0", "RW", 0, "conv out_c | pool mode (0 max, 1 avg)"},
      {reg::PARAM1, "PARAM1", "RW", 0, "conv kernel_h | pool window_h"},
      {reg::PARAM2, "PARAM2", "RW", 0, "conv kernel_w | pool window_w"},
      {reg::PARAM3, "PARAM3", "RW", 0, "conv stride | pool stride | ld/st stride"},
      {reg::PARAM4, "PARAM4", "RW", 0, "conv padding"},
      {reg::PARAM5, "PARAM5", "RW", 0, "spare"},
      {reg::PARAM6, "PARAM6", "RW", 0, "spare"},
      {reg::CYCLE_COUNT, "CYCLE_COUNT", "RO", 0, "cycles_total of last completed op"},
  };
  std::string out;
  out += "Neural engine register window @ 0x10000000 (0x100 bytes)\n";
  out += "offset  name         access  reset       role\n";
  char line[160];
  for (const Row& r : rows) {
    std::snprintf(line, sizeof line, "0x%02X    %-12s %-7s 0x%08X  %s\n",
                  r.offset, r.name, r.access, r.reset, r.role);
    out += line;
  }
  out +=
      "0x44-0xFC reserved: read 0, writes ignored.\n"
      "Compute opcodes take scratchpad byte offsets in ADDR_*; LOAD/STORE "
      "take bus addresses.\n";
  return out;
}

}  // namespace npusim
