#pragma once

// Minimal XML 1.0 DOM: a strict parser for well-formed documents and a
// serializer. Shared by the mindmap reader, the wrapper config reader,
// the tag-soup repairer and the XPath evaluator.

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mindforge/error.hpp"
#include "mindforge/text.hpp"

namespace mindforge::xml {

struct Node;
using NodePtr = std::shared_ptr<const Node>;
using NodeList = std::vector<NodePtr>;

struct Node {
  enum class Kind { Element, Text };

  Kind kind = Kind::Element;
  std::string name;  // element name; empty for text
  std::vector<std::pair<std::string, std::string>> attributes;
  NodeList children;
  std::string text;  // text nodes only

  bool is_element() const { return kind == Kind::Element; }
  bool is_text() const { return kind == Kind::Text; }

  const std::string* attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes)
      if (k == key) return &v;
    return nullptr;
  }

  std::string attribute_or(std::string_view key, std::string fallback = {}) const {
    const auto* v = attribute(key);
    return v ? *v : std::move(fallback);
  }

  std::vector<NodePtr> elements(std::string_view tag = {}) const {
    std::vector<NodePtr> out;
    for (const auto& c : children)
      if (c->is_element() && (tag.empty() || c->name == tag)) out.push_back(c);
    return out;
  }

  // Concatenated descendant text.
  std::string text_content() const {
    if (is_text()) return text;
    std::string out;
    append_text(out);
    return out;
  }

 private:
  void append_text(std::string& out) const {
    for (const auto& c : children) {
      if (c->is_text())
        out += c->text;
      else
        c->append_text(out);
    }
  }
};

inline std::shared_ptr<Node> make_element(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Element;
  n->name = std::move(name);
  return n;
}

inline std::shared_ptr<Node> make_text(std::string value) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Text;
  n->text = std::move(value);
  return n;
}

inline bool is_name_start(char32_t c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' ||
         (c >= 0xC0 && c <= 0xD6) || (c >= 0xD8 && c <= 0xF6) || (c >= 0xF8 && c <= 0x2FF) ||
         (c >= 0x370 && c <= 0x37D) || (c >= 0x37F && c <= 0x1FFF) || (c >= 0x200C && c <= 0x200D) ||
         (c >= 0x2070 && c <= 0x218F) || (c >= 0x2C00 && c <= 0x2FEF) ||
         (c >= 0x3001 && c <= 0xD7FF) || (c >= 0xF900 && c <= 0xFDCF) ||
         (c >= 0xFDF0 && c <= 0xFFFD) || (c >= 0x10000 && c <= 0xEFFFF);
}

inline bool is_name_char(char32_t c) {
  return is_name_start(c) || c == '-' || c == '.' || (c >= '0' && c <= '9') || c == 0xB7 ||
         (c >= 0x300 && c <= 0x36F) || (c >= 0x203F && c <= 0x2040);
}

inline bool is_xml_char(char32_t c) {
  return c == 0x9 || c == 0xA || c == 0xD || (c >= 0x20 && c <= 0xD7FF) ||
         (c >= 0xE000 && c <= 0xFFFD) || (c >= 0x10000 && c <= 0x10FFFF);
}

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view in) : in_(in) {}

  NodePtr parse_document() {
    validate_chars();
    if (in_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    skip_misc();
    if (at_end() || peek() != '<') fail("expected document element");
    auto root = parse_element(0);
    skip_misc();
    if (!at_end()) fail("content after document element");
    return root;
  }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos_ && i < in_.size(); ++i)
      if (in_[i] == '\n') ++line;
    throw Error(ErrorCode::MalformedXml, what + " (line " + std::to_string(line) + ")");
  }

  void validate_chars() {
    for (std::size_t i = 0; i < in_.size();) {
      const std::size_t at = i;
      const char32_t c = text::next_code_point(in_, i);
      const bool bad_seq = c == text::kReplacement && !(in_.compare(at, 3, "\xEF\xBF\xBD") == 0);
      if (bad_seq || !is_xml_char(c)) {
        pos_ = at;
        fail("invalid character");
      }
    }
  }

  bool at_end() const { return pos_ >= in_.size(); }
  char peek() const { return in_[pos_]; }
  bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

  void expect(std::string_view s) {
    if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
    pos_ += s.size();
  }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r'))
      ++pos_;
  }

  // Prolog/epilog: whitespace, comments, processing instructions, doctype.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<?")) {
        skip_until("?>");
      } else if (starts_with("<!--")) {
        skip_comment();
      } else if (starts_with("<!DOCTYPE")) {
        skip_doctype();
      } else {
        return;
      }
    }
  }

  void skip_until(std::string_view end) {
    const auto e = in_.find(end, pos_);
    if (e == std::string_view::npos) fail("unterminated construct");
    pos_ = e + end.size();
  }

  void skip_comment() {
    pos_ += 4;
    const auto e = in_.find("--", pos_);
    if (e == std::string_view::npos) fail("unterminated comment");
    if (in_.substr(e, 3) != "-->") {
      pos_ = e;
      fail("'--' inside comment");
    }
    pos_ = e + 3;
  }

  void skip_doctype() {
    int depth = 0;
    while (!at_end()) {
      const char c = in_[pos_++];
      if (c == '[') ++depth;
      if (c == ']') --depth;
      if (c == '>' && depth <= 0) return;
    }
    fail("unterminated DOCTYPE");
  }

  std::string parse_name() {
    const std::size_t start = pos_;
    std::size_t i = pos_;
    if (at_end()) fail("expected name");
    char32_t c = text::next_code_point(in_, i);
    if (!is_name_start(c)) fail("invalid name");
    pos_ = i;
    while (!at_end()) {
      i = pos_;
      c = text::next_code_point(in_, i);
      if (!is_name_char(c)) break;
      pos_ = i;
    }
    return std::string(in_.substr(start, pos_ - start));
  }

  void parse_reference(std::string& out) {
    ++pos_;  // '&'
    const auto semi = in_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) fail("unterminated entity reference");
    const auto ref = in_.substr(pos_, semi - pos_);
    pos_ = semi + 1;
    if (ref == "amp") out += '&';
    else if (ref == "lt") out += '<';
    else if (ref == "gt") out += '>';
    else if (ref == "quot") out += '"';
    else if (ref == "apos") out += '\'';
    else if (!ref.empty() && ref[0] == '#') {
      char32_t cp = 0;
      const bool hex = ref.size() > 1 && ref[1] == 'x';
      const auto digits = ref.substr(hex ? 2 : 1);
      if (digits.empty()) fail("empty character reference");
      for (char d : digits) {
        int v;
        if (d >= '0' && d <= '9') v = d - '0';
        else if (hex && d >= 'a' && d <= 'f') v = d - 'a' + 10;
        else if (hex && d >= 'A' && d <= 'F') v = d - 'A' + 10;
        else fail("bad character reference");
        cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(v);
        if (cp > 0x10FFFF) fail("character reference out of range");
      }
      if (!is_xml_char(cp)) fail("character reference to invalid character");
      text::append_utf8(out, cp);
    } else {
      fail("unknown entity &" + std::string(ref) + ";");
    }
  }

  std::string parse_attribute_value() {
    if (at_end() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
    const char quote = in_[pos_++];
    std::string out;
    while (!at_end() && peek() != quote) {
      const char c = peek();
      if (c == '<') fail("'<' in attribute value");
      if (c == '&') {
        parse_reference(out);
        continue;
      }
      // attribute-value normalization
      if (c == '\r' && pos_ + 1 < in_.size() && in_[pos_ + 1] == '\n') ++pos_;
      out += (c == '\n' || c == '\r' || c == '\t') ? ' ' : c;
      ++pos_;
    }
    if (at_end()) fail("unterminated attribute value");
    ++pos_;
    return out;
  }

  NodePtr parse_element(int depth) {
    if (depth > 512) fail("nesting too deep");
    expect("<");
    auto el = make_element(parse_name());
    for (;;) {
      const std::size_t before = pos_;
      skip_ws();
      if (at_end()) fail("unterminated start tag");
      if (starts_with("/>")) {
        pos_ += 2;
        return el;
      }
      if (peek() == '>') {
        ++pos_;
        break;
      }
      if (pos_ == before) fail("expected whitespace before attribute");
      auto key = parse_name();
      skip_ws();
      expect("=");
      skip_ws();
      auto value = parse_attribute_value();
      if (el->attribute(key)) fail("duplicate attribute '" + key + "'");
      el->attributes.emplace_back(std::move(key), std::move(value));
    }
    parse_content(*el, depth);
    return el;
  }

  void parse_content(Node& el, int depth) {
    std::string pending;
    auto flush = [&] {
      if (!pending.empty()) el.children.push_back(make_text(std::move(pending)));
      pending.clear();
    };
    for (;;) {
      if (at_end()) fail("unterminated element <" + el.name + ">");
      if (starts_with("</")) {
        pos_ += 2;
        const auto name = parse_name();
        if (name != el.name) fail("mismatched end tag </" + name + "> for <" + el.name + ">");
        skip_ws();
        expect(">");
        flush();
        return;
      }
      if (starts_with("<!--")) {
        skip_comment();
      } else if (starts_with("<![CDATA[")) {
        pos_ += 9;
        const auto e = in_.find("]]>", pos_);
        if (e == std::string_view::npos) fail("unterminated CDATA");
        pending.append(in_.substr(pos_, e - pos_));
        pos_ = e + 3;
      } else if (starts_with("<?")) {
        skip_until("?>");
      } else if (peek() == '<') {
        flush();
        el.children.push_back(parse_element(depth + 1));
      } else if (peek() == '&') {
        parse_reference(pending);
      } else {
        if (starts_with("]]>")) fail("']]>' in content");
        const char c = in_[pos_++];
        if (c == '\r') {
          if (!at_end() && peek() == '\n') ++pos_;
          pending += '\n';
        } else {
          pending += c;
        }
      }
    }
  }
};

inline void escape_into(std::string& out, std::string_view s, bool attribute) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) out += "&quot;";
        else out += c;
        break;
      case '\n':
        if (attribute) out += "&#xa;";
        else out += c;
        break;
      case '\r': out += "&#xd;"; break;
      case '\t':
        if (attribute) out += "&#x9;";
        else out += c;
        break;
      default: out += c;
    }
  }
}

inline void write(std::string& out, const Node& n) {
  if (n.is_text()) {
    escape_into(out, n.text, false);
    return;
  }
  out += '<';
  out += n.name;
  for (const auto& [k, v] : n.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    escape_into(out, v, true);
    out += '"';
  }
  if (n.children.empty()) {
    out += "/>";
    return;
  }
  out += '>';
  for (const auto& c : n.children) write(out, *c);
  out += "</";
  out += n.name;
  out += '>';
}

}  // namespace detail

// Parses a complete document and returns its document element.
inline NodePtr parse(std::string_view document) { return detail::Parser(document).parse_document(); }

inline std::string escape(std::string_view s, bool attribute = false) {
  std::string out;
  detail::escape_into(out, s, attribute);
  return out;
}

inline std::string to_string(const Node& n) {
  std::string out;
  detail::write(out, n);
  return out;
}

// Structural equality: names, attributes in order, children, text.
inline bool equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.name != b.name || a.text != b.text || a.attributes != b.attributes ||
      a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!equal(*a.children[i], *b.children[i])) return false;
  return true;
}

}  // namespace mindforge::xml
