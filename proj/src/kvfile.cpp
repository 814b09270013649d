#include "npusim/kvfile.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace npusim {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
  const size_t pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

const std::string* KvSection::find(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

const KvSection* KvDocument::first(const std::string& name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

KvParseResult parse_kv_text(const std::string& text) {
  KvParseResult result;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  KvSection* open = nullptr;

  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line == "}") {
      if (!open) {
        result.error = {"unmatched '}'", lineno};
        return result;
      }
      open = nullptr;
      continue;
    }

    if (line.back() == '{') {
      if (open) {
        result.error = {"nested sections are not supported", lineno};
        return result;
      }
      std::istringstream hdr(line.substr(0, line.size() - 1));
      KvSection section;
      section.line = lineno;
      hdr >> section.name >> section.arg;
      if (section.name.empty()) {
        result.error = {"section header without a name", lineno};
        return result;
      }
      result.doc.sections.push_back(std::move(section));
      open = &result.doc.sections.back();
      continue;
    }

    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      result.error = {"expected `key = value`, `name {` or `}`", lineno};
      return result;
    }
    if (!open) {
      result.error = {"key outside any section", lineno};
      return result;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      result.error = {"empty key or value", lineno};
      return result;
    }
    open->entries.emplace_back(key, value);
  }

  if (open) {
    result.error = {"unterminated section `" + open->name + "`", open->line};
  }
  return result;
}

KvParseResult parse_kv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    KvParseResult r;
    r.error = {"cannot open " + path, 0};
    return r;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_kv_text(ss.str());
}

std::optional<uint64_t> kv_to_u64(const std::string& value) {
  if (value.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const int base = value.size() > 2 && value[0] == '0' &&
                           (value[1] == 'x' || value[1] == 'X')
                       ? 16
                       : 10;
  const unsigned long long v = std::strtoull(value.c_str(), &end, base);
  if (errno != 0 || end != value.c_str() + value.size()) return std::nullopt;
  return v;
}

std::optional<uint32_t> kv_to_u32(const std::string& value) {
  const auto v = kv_to_u64(value);
  if (!v || *v > 0xFFFFFFFFull) return std::nullopt;
  return static_cast<uint32_t>(*v);
}

std::optional<bool> kv_to_bool(const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  return std::nullopt;
}

}  // namespace npusim
