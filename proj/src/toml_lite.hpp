#pragma once

// Minimal reader for the TOML subset used by requirements files: tables,
// bare or quoted keys, strings, booleans, numbers and single-line arrays.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace blade::toml_lite {

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<bool, double, std::string, Array> data;
};

struct Entry {
  std::string key;
  Value value;
  int line = 0;
};

struct Table {
  std::string name;  // empty for entries before the first header
  std::vector<Entry> entries;
  int line = 0;
};

/// Entries keep document order and duplicates; callers decide what a repeated
/// key means. Throws FormatError with a line number on malformed input.
std::vector<Table> parse(std::string_view text);

std::string quote(std::string_view s);

}  // namespace blade::toml_lite
