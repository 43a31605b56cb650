#include "toml_lite.hpp"

#include <cctype>
#include <charconv>

#include "blade/error.hpp"

namespace blade::toml_lite {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  /// Inside arrays newlines and comments are insignificant.
  void skip_ws_and_newlines() {
    while (true) {
      skip_ws();
      if (peek() == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      }
      if (peek() != '\n') return;
      ++pos_;
      ++line_;
    }
  }

  bool done() const { return pos_ >= s_.size(); }
  int line() const { return line_; }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  bool consume(char c) {
    skip_ws();
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  /// Consumes the rest of the line, which may only hold a comment.
  void end_line(const char* what) {
    skip_ws();
    if (peek() == '#') {
      while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
    }
    if (done()) return;
    if (peek() != '\n') fail(std::string("trailing characters after ") + what);
    ++pos_;
    ++line_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("requirements line " + std::to_string(line_) + ": " + what);
  }

  std::string key() {
    skip_ws();
    if (peek() == '"') return string();
    const auto start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '-')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string string() {
    if (!consume('"')) fail("expected '\"'");
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"' && s_[pos_] != '\n') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("dangling escape");
        const char e = s_[pos_++];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    if (peek() != '"') fail("unterminated string");
    ++pos_;
    return out;
  }

  Value value() {
    skip_ws();
    const char c = peek();
    if (c == '"') return {string()};
    if (c == '[') {
      ++pos_;
      Array items;
      skip_ws_and_newlines();
      if (consume(']')) return {items};
      while (true) {
        items.push_back(value());
        skip_ws_and_newlines();
        if (consume(',')) {
          skip_ws_and_newlines();
          if (consume(']')) break;
          continue;
        }
        if (consume(']')) break;
        fail("expected ',' or ']' in array");
      }
      return {items};
    }
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return {true};
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return {false};
    }
    const auto start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) ||
                                std::string_view("+-.eE").find(s_[pos_]) != std::string_view::npos)) {
      ++pos_;
    }
    auto token = s_.substr(start, pos_ - start);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double x = 0.0;
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
    if (token.empty() || ec != std::errc() || end != token.data() + token.size()) {
      fail("expected a value");
    }
    return {x};
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

std::vector<Table> parse(std::string_view text) {
  std::vector<Table> tables(1);
  Parser p(text);
  while (true) {
    p.skip_ws_and_newlines();
    if (p.done()) break;
    if (p.consume('[')) {
      Table t;
      t.line = p.line();
      t.name = p.key();
      if (!p.consume(']')) p.fail("expected ']' after table name");
      p.end_line("table header");
      tables.push_back(std::move(t));
      continue;
    }
    Entry e;
    e.line = p.line();
    e.key = p.key();
    if (!p.consume('=')) p.fail("expected '=' after key '" + e.key + "'");
    e.value = p.value();
    p.end_line("value");
    tables.back().entries.push_back(std::move(e));
  }
  return tables;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + '"';
}

}  // namespace blade::toml_lite
