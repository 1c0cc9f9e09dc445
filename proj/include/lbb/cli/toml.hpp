#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lbb/errors.hpp"

namespace lbb::toml {

/// Minimal TOML subset: [sections], bare keys, strings, booleans, integers,
/// floats, and (nested) arrays that may span lines. Comments start with '#'
/// outside strings. Keys are flattened to "section.key".
struct Value {
  enum class Kind { boolean, integer, floating, string, array };
  Kind kind = Kind::integer;
  bool b = false;
  std::int64_t i = 0;
  double f = 0.0;
  std::string s;
  std::vector<Value> items;
  int line = 0;

  double as_number(const std::string& key) const {
    if (kind == Kind::floating) return f;
    if (kind == Kind::integer) return static_cast<double>(i);
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' must be a number");
  }
};

using Table = std::map<std::string, Value>;

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Table parse() {
    Table table;
    std::string section;
    while (!eof()) {
      skip_ws_and_comments();
      if (eof()) break;
      if (peek() == '[') {
        section = parse_section();
        continue;
      }
      const int key_line = line_;
      std::string key = parse_key();
      skip_inline_ws();
      if (eof() || peek() != '=') fail(key_line, "expected '=' after key '" + key + "'");
      get();
      skip_inline_ws();
      Value v = parse_value();
      const std::string full = section.empty() ? key : section + "." + key;
      if (table.count(full)) fail(key_line, "duplicate key '" + full + "'");
      table.emplace(full, std::move(v));
      expect_line_end();
    }
    return table;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char get() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  [[noreturn]] void fail(int line, const std::string& what) const {
    throw ConfigError("line " + std::to_string(line) + ": " + what);
  }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) get();
  }

  void skip_comment() {
    while (!eof() && peek() != '\n') get();
  }

  void skip_ws_and_comments() {
    for (;;) {
      while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) get();
      if (!eof() && peek() == '#') {
        skip_comment();
        continue;
      }
      return;
    }
  }

  void expect_line_end() {
    skip_inline_ws();
    if (!eof() && peek() == '#') skip_comment();
    if (eof()) return;
    if (peek() == '\n' || peek() == '\r') return;
    fail(line_, std::string("unexpected trailing content starting with '") + peek() + "'");
  }

  std::string parse_section() {
    const int start_line = line_;
    get();  // '['
    std::string name;
    while (!eof() && peek() != ']' && peek() != '\n') name.push_back(get());
    if (eof() || peek() != ']') fail(start_line, "unterminated section header");
    get();
    if (name.empty()) fail(start_line, "empty section name");
    expect_line_end();
    return name;
  }

  static bool is_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string parse_key() {
    std::string key;
    while (!eof() && is_key_char(peek())) key.push_back(get());
    if (key.empty()) fail(line_, "expected a key");
    return key;
  }

  Value parse_value() {
    skip_ws_and_comments();
    if (eof()) fail(line_, "expected a value");
    Value v;
    v.line = line_;
    const char c = peek();
    if (c == '[') {
      get();
      v.kind = Value::Kind::array;
      for (;;) {
        skip_ws_and_comments();
        if (eof()) fail(v.line, "unterminated array");
        if (peek() == ']') {
          get();
          break;
        }
        v.items.push_back(parse_value());
        skip_ws_and_comments();
        if (!eof() && peek() == ',') {
          get();
          continue;
        }
        if (!eof() && peek() == ']') {
          get();
          break;
        }
        fail(line_, "expected ',' or ']' in array");
      }
      return v;
    }
    if (c == '"') {
      get();
      v.kind = Value::Kind::string;
      while (!eof() && peek() != '"') {
        char ch = get();
        if (ch == '\\' && !eof()) {
          const char esc = get();
          switch (esc) {
            case 'n': ch = '\n'; break;
            case 't': ch = '\t'; break;
            case '"': ch = '"'; break;
            case '\\': ch = '\\'; break;
            default: fail(v.line, std::string("unsupported escape '\\") + esc + "'");
          }
        }
        v.s.push_back(ch);
      }
      if (eof()) fail(v.line, "unterminated string");
      get();
      return v;
    }
    // bare token: boolean or number
    std::string token;
    while (!eof() && peek() != ',' && peek() != ']' && peek() != '\n' && peek() != '#' &&
           peek() != ' ' && peek() != '\t' && peek() != '\r')
      token.push_back(get());
    if (token == "true" || token == "false") {
      v.kind = Value::Kind::boolean;
      v.b = token == "true";
      return v;
    }
    if (token.empty()) fail(v.line, "expected a value");
    if (token.find_first_of(".eE") == std::string::npos &&
        token.find_first_not_of("+-0123456789") == std::string::npos) {
      std::size_t consumed = 0;
      try {
        v.i = std::stoll(token, &consumed);
      } catch (const std::exception&) {
        fail(v.line, "invalid integer '" + token + "'");
      }
      if (consumed != token.size()) fail(v.line, "invalid integer '" + token + "'");
      v.kind = Value::Kind::integer;
      return v;
    }
    std::size_t consumed = 0;
    try {
      v.f = std::stod(token, &consumed);
    } catch (const std::exception&) {
      fail(v.line, "invalid number '" + token + "'");
    }
    if (consumed != token.size()) fail(v.line, "invalid number '" + token + "'");
    v.kind = Value::Kind::floating;
    return v;
  }
};

}  // namespace detail

inline Table parse(std::string_view text) { return detail::Parser(text).parse(); }

}  // namespace lbb::toml
