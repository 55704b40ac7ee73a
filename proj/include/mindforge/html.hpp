#pragma once

// Tag-soup HTML to well-formed XML. Repairs are structural: stray end tags
// are ignored, unclosed elements are closed at their parent's boundary,
// void elements are self-closed, names are lowercased and sanitized, and
// attribute values are always quoted on output. Never fails.

#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mindforge/text.hpp"
#include "mindforge/xml.hpp"

namespace mindforge::html {

namespace detail {

inline const std::set<std::string, std::less<>>& void_elements() {
  static const std::set<std::string, std::less<>> s = {
      "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta",
      "param", "source", "track", "wbr", "basefont", "frame", "isindex", "keygen"};
  return s;
}

inline const std::set<std::string, std::less<>>& raw_text_elements() {
  static const std::set<std::string, std::less<>> s = {"script", "style", "textarea", "title", "xmp"};
  return s;
}

// Opening `tag` implicitly closes these open elements, up to (not past)
// the listed scope boundaries.
struct AutoClose {
  std::set<std::string, std::less<>> closes;
  std::set<std::string, std::less<>> boundary;
};

inline const std::map<std::string, AutoClose, std::less<>>& auto_close() {
  static const std::set<std::string, std::less<>> blocks = {
      "p", "div", "ul", "ol", "dl", "table", "h1", "h2", "h3", "h4", "h5", "h6",
      "pre", "blockquote", "form", "hr", "address", "fieldset", "section", "article"};
  static const std::map<std::string, AutoClose, std::less<>> m = [] {
    std::map<std::string, AutoClose, std::less<>> r;
    for (const auto& b : blocks) r[b] = {{"p"}, {"td", "th", "li", "div", "body", "button", "table"}};
    r["li"] = {{"li", "p"}, {"ul", "ol", "menu"}};
    r["dt"] = {{"dt", "dd", "p"}, {"dl"}};
    r["dd"] = {{"dt", "dd", "p"}, {"dl"}};
    r["tr"] = {{"tr", "td", "th"}, {"table", "tbody", "thead", "tfoot"}};
    r["td"] = {{"td", "th"}, {"tr", "table"}};
    r["th"] = {{"td", "th"}, {"tr", "table"}};
    r["tbody"] = {{"tbody", "thead", "tfoot", "tr", "td", "th"}, {"table"}};
    r["thead"] = r["tbody"];
    r["tfoot"] = r["tbody"];
    r["option"] = {{"option"}, {"select", "datalist"}};
    r["a"] = {{"a"}, {"td", "th", "table", "div", "li", "body"}};
    return r;
  }();
  return m;
}

inline bool ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

// Lowercases and keeps [a-z0-9._-]; names must start with a letter or '_'.
inline std::string sanitize_name(std::string_view raw) {
  std::string out;
  for (char c : raw) {
    const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if ((l >= 'a' && l <= 'z') || l == '_' || (!out.empty() && ((l >= '0' && l <= '9') || l == '-' || l == '.')))
      out += l;
  }
  return out;
}

inline const std::map<std::string, char32_t, std::less<>>& named_entities() {
  static const std::map<std::string, char32_t, std::less<>> m = {
      {"amp", '&'},     {"lt", '<'},       {"gt", '>'},      {"quot", '"'},    {"apos", '\''},
      {"nbsp", 0xA0},   {"copy", 0xA9},    {"reg", 0xAE},    {"hellip", 0x2026}, {"mdash", 0x2014},
      {"ndash", 0x2013}, {"lsquo", 0x2018}, {"rsquo", 0x2019}, {"ldquo", 0x201C}, {"rdquo", 0x201D},
      {"laquo", 0xAB},  {"raquo", 0xBB},   {"middot", 0xB7}, {"bull", 0x2022},  {"eacute", 0xE9},
      {"uuml", 0xFC},   {"ouml", 0xF6},    {"auml", 0xE4},   {"szlig", 0xDF},  {"times", 0xD7},
      {"deg", 0xB0},    {"trade", 0x2122}, {"euro", 0x20AC}};
  return m;
}

// Decodes entities, replaces invalid UTF-8 and drops characters XML forbids.
inline std::string decode_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '&') {
      const auto semi = s.find(';', i + 1);
      if (semi != std::string_view::npos && semi - i <= 10) {
        const auto ref = s.substr(i + 1, semi - i - 1);
        char32_t cp = 0;
        bool ok = false;
        if (!ref.empty() && ref[0] == '#') {
          const bool hex = ref.size() > 1 && (ref[1] == 'x' || ref[1] == 'X');
          const auto digits = ref.substr(hex ? 2 : 1);
          ok = !digits.empty();
          for (char d : digits) {
            int v = -1;
            if (d >= '0' && d <= '9') v = d - '0';
            else if (hex && d >= 'a' && d <= 'f') v = d - 'a' + 10;
            else if (hex && d >= 'A' && d <= 'F') v = d - 'A' + 10;
            if (v < 0 || cp > 0x10FFFF) {
              ok = false;
              break;
            }
            cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(v);
          }
          if (ok && !xml::is_xml_char(cp)) cp = text::kReplacement;
        } else if (auto it = named_entities().find(ref); it != named_entities().end()) {
          cp = it->second;
          ok = true;
        }
        if (ok) {
          text::append_utf8(out, cp);
          i = semi + 1;
          continue;
        }
      }
    }
    const char32_t c = text::next_code_point(s, i);
    if (c == '\r') continue;
    if (xml::is_xml_char(c)) text::append_utf8(out, c);
  }
  return out;
}

class TreeBuilder {
 public:
  explicit TreeBuilder(std::string_view in) : in_(in) {
    root_ = xml::make_element("#document");
    stack_.push_back(root_.get());
  }

  std::shared_ptr<xml::Node> build() {
    while (pos_ < in_.size()) {
      if (in_[pos_] == '<') {
        if (starts_with("<!--")) {
          skip_past("-->", 4);
        } else if (starts_with("<!") || starts_with("<?")) {
          skip_past(">", 2);
        } else if (starts_with("</")) {
          end_tag();
        } else if (pos_ + 1 < in_.size() && ascii_alpha(in_[pos_ + 1])) {
          start_tag();
        } else {
          text_run(pos_, pos_ + 1);
          ++pos_;
        }
      } else {
        const auto next = in_.find('<', pos_);
        const auto end = next == std::string_view::npos ? in_.size() : next;
        text_run(pos_, end);
        pos_ = end;
      }
    }
    return root_;
  }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
  std::shared_ptr<xml::Node> root_;
  std::vector<xml::Node*> stack_;

  bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

  void skip_past(std::string_view end, std::size_t from) {
    const auto e = in_.find(end, pos_ + from);
    pos_ = e == std::string_view::npos ? in_.size() : e + end.size();
  }

  xml::Node& current() { return *stack_.back(); }

  void append_text(std::string value) {
    if (value.empty()) return;
    auto& cur = current();
    if (!cur.children.empty() && cur.children.back()->is_text()) {
      auto merged = xml::make_text(cur.children.back()->text + value);
      cur.children.back() = merged;
    } else {
      cur.children.push_back(xml::make_text(std::move(value)));
    }
  }

  void text_run(std::size_t b, std::size_t e) { append_text(decode_text(in_.substr(b, e - b))); }

  bool is_space(char c) const { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

  void skip_space() {
    while (pos_ < in_.size() && is_space(in_[pos_])) ++pos_;
  }

  std::string_view read_token_name() {
    const auto b = pos_;
    while (pos_ < in_.size() && !is_space(in_[pos_]) && in_[pos_] != '>' && in_[pos_] != '/' &&
           in_[pos_] != '=' && in_[pos_] != '<')
      ++pos_;
    return in_.substr(b, pos_ - b);
  }

  void start_tag() {
    ++pos_;  // '<'
    const auto name = sanitize_name(read_token_name());
    auto el = xml::make_element(name.empty() ? "_" : name);
    bool self_closing = false;
    for (;;) {
      skip_space();
      if (pos_ >= in_.size()) break;
      const char c = in_[pos_];
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == '<') break;  // unterminated tag; let the next '<' start fresh
      if (c == '/') {
        ++pos_;
        if (pos_ < in_.size() && in_[pos_] == '>') {
          self_closing = true;
          ++pos_;
          break;
        }
        continue;
      }
      auto raw_key = read_token_name();
      if (raw_key.empty()) {
        ++pos_;  // stray '='
        continue;
      }
      std::string value;
      skip_space();
      if (pos_ < in_.size() && in_[pos_] == '=') {
        ++pos_;
        skip_space();
        if (pos_ < in_.size() && (in_[pos_] == '"' || in_[pos_] == '\'')) {
          const char q = in_[pos_++];
          const auto e = in_.find(q, pos_);
          const auto end = e == std::string_view::npos ? in_.size() : e;
          value = decode_text(in_.substr(pos_, end - pos_));
          pos_ = e == std::string_view::npos ? in_.size() : e + 1;
        } else {
          const auto b = pos_;
          while (pos_ < in_.size() && !is_space(in_[pos_]) && in_[pos_] != '>') ++pos_;
          value = decode_text(in_.substr(b, pos_ - b));
        }
      } else {
        value = std::string(raw_key);
      }
      const auto key = sanitize_name(raw_key);
      if (key.empty() || el->attribute(key)) continue;
      el->attributes.emplace_back(key, std::move(value));
    }
    open(std::move(el), self_closing);
  }

  void open(std::shared_ptr<xml::Node> el, bool self_closing) {
    const std::string name = el->name;
    if (auto it = auto_close().find(name); it != auto_close().end()) {
      // close the innermost matching element if nothing in between is a boundary
      for (std::size_t i = stack_.size(); i-- > 1;) {
        const auto& open_name = stack_[i]->name;
        if (it->second.closes.count(open_name)) {
          stack_.resize(i);
          break;
        }
        if (it->second.boundary.count(open_name)) break;
      }
    }
    xml::Node* raw = el.get();
    current().children.push_back(std::move(el));
    if (self_closing || void_elements().count(name)) return;
    if (raw_text_elements().count(name)) {
      const std::string close = "</" + name;
      std::size_t e = pos_;
      for (;;) {
        e = in_.find("</", e);
        if (e == std::string_view::npos) break;
        std::string probe(in_.substr(e, close.size()));
        for (auto& ch : probe) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (probe == close) break;
        e += 2;
      }
      const auto end = e == std::string_view::npos ? in_.size() : e;
      auto content = decode_text(in_.substr(pos_, end - pos_));
      if (!content.empty()) raw->children.push_back(xml::make_text(std::move(content)));
      pos_ = end;
      if (e != std::string_view::npos) skip_past(">", 2);
      return;
    }
    stack_.push_back(raw);
  }

  void end_tag() {
    pos_ += 2;
    const auto name = sanitize_name(read_token_name());
    skip_past(">", 0);
    if (name.empty()) return;
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (stack_[i]->name == name) {
        stack_.resize(i);
        return;
      }
    }
    // stray end tag: ignored
  }
};

}  // namespace detail

// Returns a single-element list holding the repaired document element. When
// the soup has no lone <html> root, the content is wrapped in <html>.
inline xml::NodeList html_to_xml(std::string_view html) {
  auto doc = detail::TreeBuilder(html).build();
  const auto elements = doc->elements();
  bool only_html_root = elements.size() == 1 && elements.front()->name == "html";
  if (only_html_root) {
    for (const auto& c : doc->children)
      if (c->is_text() && !text::trim(c->text).empty()) only_html_root = false;
  }
  if (only_html_root) return {elements.front()};
  auto root = xml::make_element("html");
  root->children = doc->children;
  return {root};
}

}  // namespace mindforge::html
