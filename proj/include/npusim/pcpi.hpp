#ifndef NPUSIM_PCPI_HPP
#define NPUSIM_PCPI_HPP

#include <cstdint>
#include <optional>

#include "npusim/memory.hpp"
#include "npusim/register_file.hpp"

namespace npusim {

// ---------------------------------------------------------------------------
// Co-processor handshake bridge.
//
// The control core hands custom instructions to the engine over a
// valid/ready interface; the bridge decodes them into the same register-file
// traffic the MMIO path produces, so both paths are equivalent by contract
// (and checked to be, by test).
//
// Instruction encoding (custom-0 major opcode):
//   [6:0]   = 0x0B
//   [14:12] = funct3: 0 start-op, 1 query-status
//   [31:25] = funct7: low 4 bits carry the engine opcode (start-op)
//   rs1     = scratchpad byte offset of a 14-word parameter block laid out
//             in register-map order (DIM0..PARAM6), 4-byte aligned
//   rs2     = unused
//
// Anything else is not handled by the bridge (IllegalInstruction), mirroring
// how an unclaimed co-processor instruction traps on the core.
// ---------------------------------------------------------------------------

inline constexpr uint32_t kPcpiCustom0 = 0x0B;

enum class PcpiFunct : uint8_t { StartOp = 0, QueryStatus = 1 };

struct PcpiRequest {
  uint32_t insn = 0;
  uint32_t rs1 = 0;
  uint32_t rs2 = 0;
};

struct PcpiResponse {
  bool ready = false;
  bool wr = false;
  uint32_t rd = 0;  // valid only when ready && wr
};

uint32_t encode_pcpi_insn(PcpiFunct funct, Opcode op = Opcode::Gemm);

enum class PcpiError : uint8_t { None = 0, IllegalInstruction };

class PcpiBridge {
 public:
  PcpiBridge(RegisterFile& regs, Scratchpad& spm) : regs_(regs), spm_(spm) {}

  // Decode and apply one instruction. Start-op fetches the parameter block
  // from the scratchpad engine port, writes the parameter registers and the
  // control word. A start the register file refuses (e.g. BUSY) completes
  // immediately with the error-flagged status in rd.
  PcpiError issue(const PcpiRequest& req);

  // ready stays false while the started operation runs; once asserted it is
  // latched (with rd = status word at completion) until the next issue.
  PcpiResponse poll();

  bool request_pending() const { return pending_; }

 private:
  RegisterFile& regs_;
  Scratchpad& spm_;
  bool pending_ = false;
  bool latched_ready_ = false;
  uint32_t latched_rd_ = 0;
  bool immediate_ = false;  // query-status or rejected start
};

}  // namespace npusim

#endif  // NPUSIM_PCPI_HPP
