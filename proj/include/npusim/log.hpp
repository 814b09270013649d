#ifndef NPUSIM_LOG_HPP
#define NPUSIM_LOG_HPP

#include <cstdarg>
#include <cstdio>
#include <string>

namespace npusim {

enum class LogLevel : uint8_t { Info = 0, Debug = 1 };

// Transaction log in the board-validation format:
//
//   [INFO] Reading status register @ 0x10000000
//   [INFO] Status = 0x00000001 (IDLE)
//
// [ERROR] is an extension for faults/mismatches; [DEBUG] lines appear only
// at debug level. Lines are captured in order and optionally echoed to a
// FILE* as they are emitted.
class Logger {
 public:
  explicit Logger(LogLevel level = LogLevel::Info, std::FILE* echo = nullptr)
      : level_(level), echo_(echo) {}

  void info(const char* fmt, ...) __attribute__((format(printf, 2, 3)));
  void error(const char* fmt, ...) __attribute__((format(printf, 2, 3)));
  void debug(const char* fmt, ...) __attribute__((format(printf, 2, 3)));

  const std::string& text() const { return text_; }
  void set_echo(std::FILE* echo) { echo_ = echo; }
  LogLevel level() const { return level_; }

 private:
  void vline(const char* tag, const char* fmt, va_list ap);

  LogLevel level_;
  std::FILE* echo_;
  std::string text_;
};

}  // namespace npusim

#endif  // NPUSIM_LOG_HPP
