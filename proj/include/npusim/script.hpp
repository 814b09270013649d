#ifndef NPUSIM_SCRIPT_HPP
#define NPUSIM_SCRIPT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "npusim/log.hpp"
#include "npusim/register_file.hpp"
#include "npusim/soc.hpp"

namespace npusim {

// ---------------------------------------------------------------------------
// Register-transaction scripts: line-oriented, one command per line, `#`
// comments. Full grammar in docs/file_formats.md.
//
//   write 0x10000004 0x00000011
//   read 0x10000000 [expect 0x00000001]
//   poll 0x10000000 mask 0x7 value 0x2 timeout 1000
//   step 16
//   load-image <path> <base>
//   dump-image <path> <base> <len>
//   pcpi-issue <gemm|conv|pool|relu|load|store> <rs1>
//   pcpi-issue status
//   pcpi-poll <timeout>
//   dma <src> <dst> <len> [<stride>]
//   dma-begin / dma-desc <src> <dst> <len> <stride> / dma-submit / dma-wait <timeout>
// ---------------------------------------------------------------------------

struct CmdWrite { uint32_t addr; uint32_t data; };
struct CmdRead { uint32_t addr; std::optional<uint32_t> expect; };
struct CmdPoll { uint32_t addr; uint32_t mask; uint32_t value; uint64_t timeout; };
struct CmdStep { uint64_t cycles; };
struct CmdLoadImage { std::string path; uint32_t base; };
struct CmdDumpImage { std::string path; uint32_t base; uint32_t len; };
struct CmdPcpiIssue { std::optional<Opcode> op; uint32_t rs1; };  // nullopt = status query
struct CmdPcpiPoll { uint64_t timeout; };
struct CmdDmaBegin {};
struct CmdDmaDesc { DmaDescriptor desc; };
struct CmdDmaSubmit {};
struct CmdDmaWait { uint64_t timeout; };

using ScriptCommand =
    std::variant<CmdWrite, CmdRead, CmdPoll, CmdStep, CmdLoadImage,
                 CmdDumpImage, CmdPcpiIssue, CmdPcpiPoll, CmdDmaBegin,
                 CmdDmaDesc, CmdDmaSubmit, CmdDmaWait>;

struct ScriptParseError {
  std::string message;
  int line = 0;
  int column = 0;
};

struct ScriptParseResult {
  std::vector<ScriptCommand> commands;
  std::optional<ScriptParseError> error;
  bool ok() const { return !error.has_value(); }
};

ScriptParseResult parse_script_text(const std::string& text);
ScriptParseResult parse_script_file(const std::string& path);

struct ScriptRunStats {
  uint32_t expect_mismatches = 0;
  uint32_t poll_timeouts = 0;
  uint32_t io_errors = 0;  // unreadable image files, rejected dma submits

  // Exit-status contract: among runs that execute, 0 iff no expect mismatch
  // and no poll timeout. 2 marks a run the environment broke (like a parse
  // error does before execution).
  int exit_status() const {
    if (expect_mismatches || poll_timeouts) return 1;
    return io_errors ? 2 : 0;
  }
};

// Executes commands in order against the simulator, logging one transaction
// per command in the validation-log format.
ScriptRunStats run_script(SocSimulator& sim, const std::vector<ScriptCommand>& commands,
                          Logger& log);

}  // namespace npusim

#endif  // NPUSIM_SCRIPT_HPP
