#pragma once

// A closed XPath subset over the xml DOM:
//
//   path      := step+            e.g. //a[contains(@id,'p-')]  /html/body/td[2]
//   step      := ('/' | '//') nametest predicate*
//   nametest  := NAME | '*'
//   predicate := '[' N ']' | '[' '@' NAME ']' | '[' '@' NAME '=' LIT ']'
//              | '[' 'contains(' '@' NAME ',' LIT ')' ']'
//
// The input node list is treated as the children of a virtual document
// node. Results are distinct nodes of the input trees in document order.
// Anything outside the subset raises UnsupportedXPath; malformed input of
// the subset raises SyntaxError.

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mindforge/error.hpp"
#include "mindforge/xml.hpp"

namespace mindforge::xpath {

struct Predicate {
  enum class Kind { Position, HasAttribute, AttributeEquals, AttributeContains };
  Kind kind = Kind::Position;
  std::size_t position = 0;
  std::string attribute;
  std::string literal;
};

struct Step {
  bool descendant = false;  // '//' rather than '/'
  std::string name;         // "*" matches any element
  std::vector<Predicate> predicates;
};

struct Expression {
  std::vector<Step> steps;
};

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  Expression parse() {
    Expression e;
    skip_ws();
    if (at_end()) syntax("empty expression");
    if (peek() != '/') unsupported("relative location paths");
    while (!at_end()) {
      e.steps.push_back(parse_step());
      skip_ws();
    }
    return e;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void syntax(const std::string& what) const {
    throw Error(ErrorCode::SyntaxError, what + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw Error(ErrorCode::UnsupportedXPath, what + " in '" + std::string(s_) + "'");
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n')) ++pos_;
  }
  bool accept(std::string_view t) {
    skip_ws();
    if (s_.substr(pos_, t.size()) == t) {
      pos_ += t.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view t) {
    if (!accept(t)) syntax("expected '" + std::string(t) + "'");
  }

  static bool name_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
  static bool name_char(char c) {
    return name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.' || c == ':';
  }

  std::string parse_name() {
    skip_ws();
    const auto b = pos_;
    if (at_end() || !name_start(peek())) syntax("expected name");
    while (!at_end() && name_char(peek())) ++pos_;
    return std::string(s_.substr(b, pos_ - b));
  }

  std::string parse_literal() {
    skip_ws();
    if (at_end() || (peek() != '\'' && peek() != '"')) syntax("expected string literal");
    const char q = s_[pos_++];
    const auto e = s_.find(q, pos_);
    if (e == std::string_view::npos) syntax("unterminated string literal");
    std::string lit(s_.substr(pos_, e - pos_));
    pos_ = e + 1;
    return lit;
  }

  Step parse_step() {
    Step step;
    if (accept("//")) step.descendant = true;
    else if (accept("/")) step.descendant = false;
    else syntax("expected '/'");
    skip_ws();
    if (at_end()) syntax("expected node test");
    if (peek() == '*') {
      ++pos_;
      step.name = "*";
    } else if (peek() == '@') {
      unsupported("attribute axis steps");
    } else if (peek() == '.') {
      unsupported("abbreviated '.'/'..' steps");
    } else {
      step.name = parse_name();
      if (step.name.find("::") != std::string::npos) unsupported("explicit axes");
      skip_ws();
      if (!at_end() && peek() == '(') unsupported("node-type tests and functions in steps");
    }
    while (accept("[")) {
      step.predicates.push_back(parse_predicate());
      expect("]");
    }
    skip_ws();
    if (!at_end() && peek() != '/') {
      if (peek() == '|') unsupported("union expressions");
      syntax(std::string("unexpected '") + peek() + "'");
    }
    return step;
  }

  Predicate parse_predicate() {
    Predicate p;
    skip_ws();
    if (at_end()) syntax("unterminated predicate");
    if (peek() >= '0' && peek() <= '9') {
      std::size_t n = 0;
      while (!at_end() && peek() >= '0' && peek() <= '9') n = n * 10 + static_cast<std::size_t>(peek() - '0'), ++pos_;
      if (n == 0) syntax("positions start at 1");
      p.kind = Predicate::Kind::Position;
      p.position = n;
      return p;
    }
    if (accept("@")) {
      p.attribute = parse_name();
      if (accept("=")) {
        p.kind = Predicate::Kind::AttributeEquals;
        p.literal = parse_literal();
      } else {
        skip_ws();
        if (!at_end() && peek() != ']') unsupported("operators other than '='");
        p.kind = Predicate::Kind::HasAttribute;
      }
      return p;
    }
    const auto fn_start = pos_;
    if (!at_end() && name_start(peek())) {
      const auto fn = parse_name();
      if (fn == "contains" && accept("(")) {
        if (!accept("@")) unsupported("contains() over non-attribute arguments");
        p.attribute = parse_name();
        expect(",");
        p.literal = parse_literal();
        expect(")");
        p.kind = Predicate::Kind::AttributeContains;
        return p;
      }
      pos_ = fn_start;
      unsupported("predicate '" + fn + "'");
    }
    syntax("malformed predicate");
  }
};

inline bool name_matches(const xml::Node& n, const std::string& name) {
  return n.is_element() && (name == "*" || n.name == name);
}

inline bool test(const xml::Node& n, const Predicate& p) {
  const auto* v = n.attribute(p.attribute);
  switch (p.kind) {
    case Predicate::Kind::HasAttribute: return v != nullptr;
    case Predicate::Kind::AttributeEquals: return v && *v == p.literal;
    case Predicate::Kind::AttributeContains: return v && v->find(p.literal) != std::string::npos;
    case Predicate::Kind::Position: return false;
  }
  return false;
}

// Child-axis selection of one step from a single parent, with predicates
// applied in order (positions count within the filtered sibling list).
inline xml::NodeList select_children(const xml::NodeList& children, const Step& step) {
  xml::NodeList out;
  for (const auto& c : children)
    if (name_matches(*c, step.name)) out.push_back(c);
  for (const auto& p : step.predicates) {
    xml::NodeList next;
    if (p.kind == Predicate::Kind::Position) {
      if (p.position <= out.size()) next.push_back(out[p.position - 1]);
    } else {
      for (const auto& n : out)
        if (test(*n, p)) next.push_back(n);
    }
    out = std::move(next);
  }
  return out;
}

inline void descendants_or_self(const xml::NodePtr& n, xml::NodeList& out) {
  if (!n->is_element()) return;
  out.push_back(n);
  for (const auto& c : n->children) descendants_or_self(c, out);
}

}  // namespace detail

inline Expression compile(std::string_view expr) { return detail::ExprParser(expr).parse(); }

inline xml::NodeList evaluate(const xml::NodeList& nodes, const Expression& expr) {
  // A null context entry stands for the virtual document node.
  xml::NodeList context{nullptr};
  for (const auto& step : expr.steps) {
    std::vector<const xml::NodeList*> parents;
    for (const auto& c : context) {
      const xml::NodeList& kids = c ? c->children : nodes;
      parents.push_back(&kids);
      if (!step.descendant) continue;
      xml::NodeList below;
      for (const auto& k : kids) detail::descendants_or_self(k, below);
      for (const auto& b : below) parents.push_back(&b->children);
    }
    std::unordered_set<const xml::Node*> seen;
    xml::NodeList next;
    for (const auto* p : parents)
      for (const auto& hit : detail::select_children(*p, step))
        if (seen.insert(hit.get()).second) next.push_back(hit);
    context = std::move(next);
    if (context.empty()) return {};
  }

  // document order
  std::unordered_set<const xml::Node*> wanted;
  for (const auto& n : context) wanted.insert(n.get());
  xml::NodeList ordered;
  std::function<void(const xml::NodePtr&)> walk = [&](const xml::NodePtr& n) {
    if (wanted.count(n.get())) ordered.push_back(n);
    for (const auto& c : n->children) walk(c);
  };
  for (const auto& n : nodes) walk(n);
  return ordered;
}

inline xml::NodeList eval(const xml::NodeList& nodes, std::string_view expr) {
  return evaluate(nodes, compile(expr));
}

}  // namespace mindforge::xpath
