#ifndef NPUSIM_REGISTER_FILE_HPP
#define NPUSIM_REGISTER_FILE_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "npusim/bus.hpp"
#include "npusim/numerics.hpp"

namespace npusim {

// ---------------------------------------------------------------------------
// Neural engine control/status window @ 0x10000000 (0x100 bytes).
//
//   0x00  STATUS       RO   state code | error flag (reset 0x00000001)
//   0x04  CONTROL      R/W  [3:0] opcode, [4] START (W1P, reads as 0)
//   0x08  DIM0         R/W  gemm m    | conv in_h   | pool in_h  | relu count | ld/st length
//   0x0C  DIM1         R/W  gemm n    | conv in_w   | pool in_w
//   0x10  DIM2         R/W  gemm k    | conv in_c
//   0x14  ADDR_A       R/W  gemm A    | conv input  | pool input | relu src   | ld/st src
//   0x18  ADDR_B       R/W  gemm B    | conv weights
//   0x1C  ADDR_C       R/W  gemm C    | conv output | pool output| relu dst   | ld/st dst
//   0x20  SCALE        R/W  [5:0] right shift, [8] round-half-up
//   0x24  PARAM0       R/W  conv out_c    | pool mode (0 max, 1 avg)
//   0x28  PARAM1       R/W  conv kernel_h | pool window_h
//   0x2C  PARAM2       R/W  conv kernel_w | pool window_w
//   0x30  PARAM3       R/W  conv stride   | pool stride | ld/st stride
//   0x34  PARAM4       R/W  conv padding
//   0x38  PARAM5       R/W  spare
//   0x3C  PARAM6       R/W  spare
//   0x40  CYCLE_COUNT  RO   cycles_total of the last completed operation
//
// Compute opcodes take scratchpad byte offsets in ADDR_*; LOAD/STORE take
// full bus addresses. Offsets 0x44-0xFC are reserved: reads return 0, writes
// are ignored. Addresses outside the window fault at the bus.
// ---------------------------------------------------------------------------

namespace reg {
inline constexpr uint32_t STATUS = 0x00;
inline constexpr uint32_t CONTROL = 0x04;
inline constexpr uint32_t DIM0 = 0x08;
inline constexpr uint32_t DIM1 = 0x0C;
inline constexpr uint32_t DIM2 = 0x10;
inline constexpr uint32_t ADDR_A = 0x14;
inline constexpr uint32_t ADDR_B = 0x18;
inline constexpr uint32_t ADDR_C = 0x1C;
inline constexpr uint32_t SCALE = 0x20;
inline constexpr uint32_t PARAM0 = 0x24;
inline constexpr uint32_t PARAM1 = 0x28;
inline constexpr uint32_t PARAM2 = 0x2C;
inline constexpr uint32_t PARAM3 = 0x30;
inline constexpr uint32_t PARAM4 = 0x34;
inline constexpr uint32_t PARAM5 = 0x38;
inline constexpr uint32_t PARAM6 = 0x3C;
inline constexpr uint32_t CYCLE_COUNT = 0x40;

// STATUS codes. One-hot among IDLE/BUSY/DONE at all times; ERR rides bit 31.
inline constexpr uint32_t STATUS_IDLE = 0x00000001u;
inline constexpr uint32_t STATUS_DONE = 0x00000002u;
inline constexpr uint32_t STATUS_BUSY = 0x00000004u;
inline constexpr uint32_t STATUS_ERR = 0x80000000u;
inline constexpr uint32_t STATUS_STATE_MASK = 0x00000007u;

// CONTROL bits.
inline constexpr uint32_t CTRL_OP_MASK = 0x0000000Fu;
inline constexpr uint32_t CTRL_START = 0x00000010u;

// First parameter register offset and count (DIM0 .. PARAM6).
inline constexpr uint32_t PARAM_BASE = DIM0;
inline constexpr uint32_t PARAM_WORDS = 14;

// SCALE encoding.
inline constexpr uint32_t SCALE_SHIFT_MASK = 0x3Fu;
inline constexpr uint32_t SCALE_ROUND_HALF_UP = 0x100u;
}  // namespace reg

enum class Opcode : uint8_t {
  Gemm = 0x1,
  Conv = 0x2,
  Pool = 0x3,
  Relu = 0x4,
  Load = 0x5,
  Store = 0x6,
};

const char* opcode_name(Opcode op);            // "GEMM", "CONV", ...
std::optional<Opcode> opcode_from_bits(uint32_t bits);
std::optional<Opcode> opcode_from_name(const std::string& name);  // case-insensitive

enum class EngineState : uint8_t { Idle, Busy, Done };

ScaleSpec scale_from_word(uint32_t word);
uint32_t scale_to_word(const ScaleSpec& scale);

// Decode STATUS/CONTROL words for log output: "IDLE", "DONE | ERR",
// "GEMM | START", ...
std::string decode_status_word(uint32_t word);
std::string decode_control_word(uint32_t word);

// One accepted START: the latched opcode plus a snapshot of the parameter
// registers taken at the START write. The engine executes exactly this
// snapshot; later parameter writes belong to the next operation.
struct StartEvent {
  Opcode op = Opcode::Gemm;
  std::array<uint32_t, reg::PARAM_WORDS> params{};
};

// IDLE -> BUSY -> DONE -> BUSY three-state machine behind the window above.
//
// Write rules:
//   - STATUS writes are ignored.
//   - CONTROL with START while IDLE/DONE: parameters are snapshotted and
//     validated; on acceptance the error flag clears and state goes BUSY.
//     A rejected START (bad opcode or validator refusal) leaves the state
//     unchanged and sets the error flag.
//   - CONTROL with START while BUSY: ignored, error flag set.
//   - Parameter writes while BUSY: ignored, error flag set.
//   - Reserved offsets: reads 0, writes ignored, never an error.
class RegisterFile : public MmioDevice {
 public:
  using StartValidator = std::function<bool(const StartEvent&)>;

  uint32_t mmio_read(uint32_t offset) override;
  void mmio_write(uint32_t offset, uint32_t word) override;

  // Stepper hooks ----------------------------------------------------------

  // Accepted START not yet collected by the execution layer, if any.
  std::optional<StartEvent> take_start();

  // BUSY -> DONE edge; latches CYCLE_COUNT. No effect outside BUSY.
  void step_state(bool engine_done, uint32_t cycles_total);

  // Completion-time error reporting (e.g. a failed LOAD/STORE transfer).
  void flag_error() { error_ = true; }

  // Installed by the SoC so footprint/parameter checking happens before the
  // BUSY transition. Absent validator accepts every decodable opcode.
  void set_start_validator(StartValidator v) { validator_ = std::move(v); }

  EngineState state() const { return state_; }
  bool error_flag() const { return error_; }
  uint32_t status_word() const;
  uint32_t cycle_count() const { return cycle_count_; }
  uint32_t param(uint32_t offset) const;  // register offset, not index

 private:
  void write_control(uint32_t word);

  EngineState state_ = EngineState::Idle;
  bool error_ = false;
  uint32_t latched_opcode_bits_ = 0;
  uint32_t cycle_count_ = 0;
  std::array<uint32_t, reg::PARAM_WORDS> params_{};
  std::optional<StartEvent> pending_start_;
  StartValidator validator_;
};

// Plain-text register reference (offset, name, access, reset, role), the
// generated documentation behind the CLI `regmap` command.
std::string register_reference_text();

}  // namespace npusim

#endif  // NPUSIM_REGISTER_FILE_HPP
