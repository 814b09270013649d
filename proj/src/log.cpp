#include "npusim/log.hpp"

#include <vector>

namespace npusim {

void Logger::vline(const char* tag, const char* fmt, va_list ap) {
  va_list ap2;
  va_copy(ap2, ap);
  const int n = std::vsnprintf(nullptr, 0, fmt, ap);
  std::vector<char> buf(static_cast<size_t>(n) + 1);
  std::vsnprintf(buf.data(), buf.size(), fmt, ap2);
  va_end(ap2);

  std::string line(tag);
  line += ' ';
  line.append(buf.data(), static_cast<size_t>(n));
  line += '\n';
  text_ += line;
  if (echo_) std::fputs(line.c_str(), echo_);
}

void Logger::info(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  vline("[INFO]", fmt, ap);
  va_end(ap);
}

void Logger::error(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  vline("[ERROR]", fmt, ap);
  va_end(ap);
}

void Logger::debug(const char* fmt, ...) {
  if (level_ != LogLevel::Debug) return;
  va_list ap;
  va_start(ap, fmt);
  vline("[DEBUG]", fmt, ap);
  va_end(ap);
}

}  // namespace npusim
