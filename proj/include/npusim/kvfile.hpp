#ifndef NPUSIM_KVFILE_HPP
#define NPUSIM_KVFILE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace npusim {

// ---------------------------------------------------------------------------
// Sectioned key-value text: the grammar behind workload manifests and
// --config files (see docs/file_formats.md).
//
//   # comment
//   section [argument] {
//     key = value
//   }
//
// One directive per line; blank lines and '#' comments anywhere.
// ---------------------------------------------------------------------------

struct KvSection {
  std::string name;              // "engine", "op", ...
  std::string arg;               // e.g. the op kind: `op gemm {`
  int line = 0;                  // of the opening brace line
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* find(const std::string& key) const;
  bool has(const std::string& key) const { return find(key) != nullptr; }
};

struct KvParseError {
  std::string message;
  int line = 0;
};

struct KvDocument {
  std::vector<KvSection> sections;

  const KvSection* first(const std::string& name) const;
};

// Returns the error instead of a document on malformed input.
struct KvParseResult {
  KvDocument doc;
  std::optional<KvParseError> error;
  bool ok() const { return !error.has_value(); }
};

KvParseResult parse_kv_text(const std::string& text);
KvParseResult parse_kv_file(const std::string& path);

// Value conversions. Accept decimal and 0x-prefixed hex; report nullopt on
// malformed or out-of-range input.
std::optional<uint64_t> kv_to_u64(const std::string& value);
std::optional<uint32_t> kv_to_u32(const std::string& value);
std::optional<bool> kv_to_bool(const std::string& value);  // on/off, true/false, 1/0

}  // namespace npusim

#endif  // NPUSIM_KVFILE_HPP
