#include "npusim/pcpi.hpp"

namespace npusim {

uint32_t encode_pcpi_insn(PcpiFunct funct, Opcode op) {
  uint32_t insn = kPcpiCustom0;
  insn |= (static_cast<uint32_t>(funct) & 0x7u) << 12;
  if (funct == PcpiFunct::StartOp) {
    insn |= (static_cast<uint32_t>(op) & 0xFu) << 25;
  }
  return insn;
}

PcpiError PcpiBridge::issue(const PcpiRequest& req) {
  if ((req.insn & 0x7Fu) != kPcpiCustom0) return PcpiError::IllegalInstruction;
  const uint32_t funct3 = (req.insn >> 12) & 0x7u;

  if (funct3 == static_cast<uint32_t>(PcpiFunct::QueryStatus)) {
    pending_ = true;
    immediate_ = true;
    latched_ready_ = true;
    latched_rd_ = regs_.status_word();
    return PcpiError::None;
  }

  if (funct3 != static_cast<uint32_t>(PcpiFunct::StartOp)) {
    return PcpiError::IllegalInstruction;
  }

  const uint32_t op_bits = (req.insn >> 25) & 0xFu;
  if (!opcode_from_bits(op_bits)) return PcpiError::IllegalInstruction;

  // rs1 names a 14-word parameter block in the scratchpad, register-map order.
  const uint32_t block_bytes = 4 * reg::PARAM_WORDS;
  if (req.rs1 % 4 != 0 || uint64_t{req.rs1} + block_bytes > spm_.size()) {
    return PcpiError::IllegalInstruction;
  }

  pending_ = true;
  immediate_ = false;
  latched_ready_ = false;
  latched_rd_ = 0;

  for (uint32_t w = 0; w < reg::PARAM_WORDS; ++w) {
    regs_.mmio_write(reg::PARAM_BASE + 4 * w, spm_.read32(req.rs1 + 4 * w));
  }
  regs_.mmio_write(reg::CONTROL, op_bits | reg::CTRL_START);

  // An accepted START clears the error flag; a refused one (busy engine or
  // rejected parameters) sets it. Complete refused handshakes immediately so
  // the core is not left waiting on an operation that never started.
  if (regs_.error_flag()) {
    immediate_ = true;
    latched_ready_ = true;
    latched_rd_ = regs_.status_word();
  }
  return PcpiError::None;
}

PcpiResponse PcpiBridge::poll() {
  if (!pending_) return {};
  if (!latched_ready_) {
    if (regs_.state() == EngineState::Busy) return {};
    latched_ready_ = true;
    latched_rd_ = regs_.status_word();
  }
  return {true, true, latched_rd_};
}

}  // namespace npusim
