#pragma once

// Reader for the TOML subset used by service configs: key/value pairs with
// bare or quoted (dotted) keys, [table] and [[array-of-tables]] headers,
// basic and literal strings, integers, floats, booleans and single-line
// arrays of those. Produces a JSON object.

#include <cctype>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mindforge/error.hpp"
#include "mindforge/text.hpp"

namespace mindforge::toml {

namespace detail {

class Reader {
 public:
  explicit Reader(std::string_view src) : src_(src) {}

  nlohmann::json read() {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    for (const auto raw : text::split_lines(src_)) {
      ++line_;
      line_text_ = raw;
      pos_ = 0;
      skip_ws();
      if (at_end() || peek() == '#') continue;
      if (peek() == '[') {
        table = header(root);
      } else {
        auto path = key_path();
        skip_ws();
        expect('=');
        auto value = parse_value();
        end_of_line();
        auto* slot = table;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) slot = &descend(*slot, path[i]);
        if (slot->contains(path.back())) fail("key '" + path.back() + "' defined twice");
        (*slot)[path.back()] = std::move(value);
      }
    }
    return root;
  }

 private:
  std::string_view src_;
  std::string_view line_text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_) + ": " + what);
  }

  bool at_end() const { return pos_ >= line_text_.size(); }
  char peek() const { return line_text_[pos_]; }
  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void expect(char c) {
    skip_ws();
    if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void end_of_line() {
    skip_ws();
    if (!at_end() && peek() != '#') fail("trailing characters");
  }

  nlohmann::json& descend(nlohmann::json& t, const std::string& key) {
    auto& next = t[key];
    if (next.is_null()) next = nlohmann::json::object();
    if (next.is_array() && !next.empty() && next.back().is_object()) return next.back();
    if (!next.is_object()) fail("'" + key + "' is not a table");
    return next;
  }

  nlohmann::json* header(nlohmann::json& root) {
    const bool array = line_text_.substr(pos_, 2) == "[[";
    pos_ += array ? 2 : 1;
    auto path = key_path();
    skip_ws();
    if (line_text_.substr(pos_, array ? 2 : 1) != (array ? "]]" : "]")) fail("unterminated table header");
    pos_ += array ? 2 : 1;
    end_of_line();
    nlohmann::json* t = &root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) t = &descend(*t, path[i]);
    auto& last = (*t)[path.back()];
    if (array) {
      if (last.is_null()) last = nlohmann::json::array();
      if (!last.is_array()) fail("'" + path.back() + "' is not an array of tables");
      last.push_back(nlohmann::json::object());
      return &last.back();
    }
    if (last.is_null()) last = nlohmann::json::object();
    if (!last.is_object()) fail("'" + path.back() + "' is not a table");
    return &last;
  }

  std::vector<std::string> key_path() {
    std::vector<std::string> path;
    for (;;) {
      skip_ws();
      if (at_end()) fail("expected key");
      if (peek() == '"' || peek() == '\'') {
        path.push_back(string_value());
      } else {
        const auto b = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
        if (b == pos_) fail("expected key");
        path.emplace_back(line_text_.substr(b, pos_ - b));
      }
      skip_ws();
      if (at_end() || peek() != '.') break;
      ++pos_;
    }
    return path;
  }

  std::string string_value() {
    const char q = line_text_[pos_++];
    std::string out;
    while (!at_end() && peek() != q) {
      char c = line_text_[pos_++];
      if (q == '"' && c == '\\') {
        if (at_end()) fail("dangling escape");
        c = line_text_[pos_++];
        switch (c) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'u': {
            if (pos_ + 4 > line_text_.size()) fail("short \\u escape");
            const auto cp = std::stoul(std::string(line_text_.substr(pos_, 4)), nullptr, 16);
            pos_ += 4;
            text::append_utf8(out, static_cast<char32_t>(cp));
            break;
          }
          default: fail(std::string("unknown escape \\") + c);
        }
        continue;
      }
      out += c;
    }
    if (at_end()) fail("unterminated string");
    ++pos_;
    return out;
  }

  nlohmann::json parse_value() {
    skip_ws();
    if (at_end()) fail("expected value");
    const char c = peek();
    if (c == '"' || c == '\'') return string_value();
    if (c == '[') {
      ++pos_;
      auto arr = nlohmann::json::array();
      for (;;) {
        skip_ws();
        if (at_end()) fail("unterminated array");
        if (peek() == ']') {
          ++pos_;
          return arr;
        }
        arr.push_back(parse_value());
        skip_ws();
        if (!at_end() && peek() == ',') ++pos_;
        else if (at_end() || peek() != ']') fail("expected ',' or ']'");
      }
    }
    const auto b = pos_;
    while (!at_end() && peek() != ',' && peek() != ']' && peek() != '#' && peek() != ' ' && peek() != '\t') ++pos_;
    std::string tok(line_text_.substr(b, pos_ - b));
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string digits;
    for (char ch : tok)
      if (ch != '_') digits += ch;
    try {
      std::size_t used = 0;
      if (digits.find_first_of(".eE") == std::string::npos) {
        const long long v = std::stoll(digits, &used);
        if (used == digits.size()) return v;
      } else {
        const double v = std::stod(digits, &used);
        if (used == digits.size()) return v;
      }
    } catch (const std::exception&) {
    }
    fail("bad value '" + tok + "'");
  }
};

}  // namespace detail

inline nlohmann::json parse(std::string_view src) { return detail::Reader(src).read(); }

}  // namespace mindforge::toml
