#pragma once

// Interpreter for the XML scraping-workflow dialect used to wrap data
// sources:
//
//   <config charset="UTF-8">
//     <var-def name="searchQuery" overwrite="false"/>
//     <var-def name="content">
//       <html-to-xml><http url="http://host/search?q=${searchQuery}"/></html-to-xml>
//     </var-def>
//     <var-def name="titles">
//       <xpath expression="//a[contains(@id,'p-')]"><var name="content"/></xpath>
//     </var-def>
//   </config>
//
// Var-defs run in document order. A processor's value feeds the enclosing
// processor. Plain text inside a var-def is a constant.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "mindforge/error.hpp"
#include "mindforge/html.hpp"
#include "mindforge/record.hpp"
#include "mindforge/text.hpp"
#include "mindforge/xml.hpp"
#include "mindforge/xpath.hpp"

namespace mindforge::wrapper {

struct Processor;
using ProcessorPtr = std::shared_ptr<const Processor>;

struct Http {
  std::string url_template;
};
struct HtmlToXml {
  ProcessorPtr inner;
};
struct XPath {
  std::string expression;
  ProcessorPtr inner;
};
struct VarRef {
  std::string name;
};
struct ConstText {
  std::string text;
};

struct Processor {
  std::variant<Http, HtmlToXml, XPath, VarRef, ConstText> op;
};

struct VarDef {
  std::string name;
  bool overwrite = true;
  ProcessorPtr pipeline;  // null: binds empty text
};

enum class Charset { Utf8, Latin1 };

struct WrapperConfig {
  std::string charset = "UTF-8";
  std::vector<VarDef> var_defs;

  const VarDef* find(std::string_view name) const {
    for (const auto& v : var_defs)
      if (v.name == name) return &v;
    return nullptr;
  }
};

using Value = std::variant<std::string, xml::NodeList>;

struct ExecutionContext {
  std::map<std::string, Value> bindings;
  std::vector<std::string> requested_urls;

  const Value* get(std::string_view name) const {
    auto it = bindings.find(std::string(name));
    return it == bindings.end() ? nullptr : &it->second;
  }
};

// url -> response body. Must throw Error(FetchFailed) on failure and be
// safe to call concurrently.
using Fetcher = std::function<std::string(const std::string& url)>;

inline Charset charset_of(std::string_view name) {
  const auto n = text::casefold(name);
  if (n == "utf-8" || n == "utf8" || n == "us-ascii" || n == "ascii") return Charset::Utf8;
  if (n == "iso-8859-1" || n == "latin1" || n == "latin-1" || n == "iso8859-1") return Charset::Latin1;
  throw Error(ErrorCode::MalformedConfig, "unsupported charset '" + std::string(name) + "'");
}

namespace detail {

inline bool blank(std::string_view s) { return text::trim(s).empty(); }

inline ProcessorPtr parse_processor(const xml::Node& el) {
  auto p = std::make_shared<Processor>();
  const auto inner_of = [&](const xml::Node& e) -> ProcessorPtr {
    const auto kids = e.elements();
    for (const auto& c : e.children)
      if (c->is_text() && !blank(c->text))
        throw Error(ErrorCode::MalformedConfig, "<" + e.name + "> cannot mix text and processors");
    if (kids.size() != 1)
      throw Error(ErrorCode::MalformedConfig, "<" + e.name + "> needs exactly one inner processor");
    return parse_processor(*kids.front());
  };
  if (el.name == "http") {
    const auto* url = el.attribute("url");
    if (!url || url->empty()) throw Error(ErrorCode::MalformedConfig, "<http> requires a url attribute");
    if (!el.elements().empty()) throw Error(ErrorCode::MalformedConfig, "<http> takes no inner processor");
    p->op = Http{*url};
  } else if (el.name == "html-to-xml") {
    p->op = HtmlToXml{inner_of(el)};
  } else if (el.name == "xpath") {
    const auto* expr = el.attribute("expression");
    if (!expr || expr->empty()) throw Error(ErrorCode::MalformedConfig, "<xpath> requires an expression attribute");
    p->op = XPath{*expr, inner_of(el)};
  } else if (el.name == "var") {
    const auto* name = el.attribute("name");
    if (!name || name->empty()) throw Error(ErrorCode::MalformedConfig, "<var> requires a name attribute");
    p->op = VarRef{*name};
  } else {
    throw Error(ErrorCode::UnknownProcessor, "unknown processor <" + el.name + ">");
  }
  return p;
}

}  // namespace detail

inline WrapperConfig parse_config(std::string_view xml_text) {
  xml::NodePtr doc;
  try {
    doc = xml::parse(xml_text);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedConfig, e.detail());
  }
  if (doc->name != "config")
    throw Error(ErrorCode::MalformedConfig, "document element is <" + doc->name + ">, expected <config>");
  WrapperConfig cfg;
  cfg.charset = doc->attribute_or("charset", "UTF-8");
  charset_of(cfg.charset);
  for (const auto& c : doc->children) {
    if (c->is_text()) {
      if (!detail::blank(c->text)) throw Error(ErrorCode::MalformedConfig, "stray text in <config>");
      continue;
    }
    if (c->name != "var-def") throw Error(ErrorCode::UnknownProcessor, "unknown top-level element <" + c->name + ">");
    VarDef v;
    v.name = c->attribute_or("name");
    if (v.name.empty()) throw Error(ErrorCode::MalformedConfig, "<var-def> requires a name");
    if (cfg.find(v.name)) throw Error(ErrorCode::DuplicateVarDef, "var-def '" + v.name + "' defined twice");
    const auto ow = c->attribute_or("overwrite", "true");
    if (ow != "true" && ow != "false")
      throw Error(ErrorCode::MalformedConfig, "overwrite must be true or false, got '" + ow + "'");
    v.overwrite = ow == "true";
    const auto kids = c->elements();
    std::string literal;
    bool has_text = false;
    for (const auto& t : c->children)
      if (t->is_text() && !detail::blank(t->text)) {
        has_text = true;
        literal += t->text;
      }
    if (has_text && !kids.empty())
      throw Error(ErrorCode::MalformedConfig, "var-def '" + v.name + "' mixes text and processors");
    if (kids.size() > 1)
      throw Error(ErrorCode::MalformedConfig, "var-def '" + v.name + "' has more than one pipeline");
    if (kids.size() == 1) {
      v.pipeline = detail::parse_processor(*kids.front());
    } else if (has_text) {
      auto p = std::make_shared<Processor>();
      p->op = ConstText{literal};
      v.pipeline = p;
    }
    cfg.var_defs.push_back(std::move(v));
  }
  if (cfg.var_defs.empty()) throw Error(ErrorCode::MalformedConfig, "config defines no var-def");
  return cfg;
}

// Percent-encodes everything outside the RFC 3986 unreserved set.
inline std::string url_escape(std::string_view s) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.' ||
        c == '_' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xF];
    }
  }
  return out;
}

inline std::string value_text(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  std::string out;
  for (const auto& n : std::get<xml::NodeList>(v)) out += n->text_content();
  return out;
}

// Splices ${name} occurrences with URL-escaped bindings.
inline std::string substitute(std::string_view tmpl, const std::map<std::string, Value>& bindings) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    const auto open = tmpl.find("${", i);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(i));
      break;
    }
    out.append(tmpl.substr(i, open - i));
    const auto close = tmpl.find('}', open + 2);
    if (close == std::string_view::npos) throw Error(ErrorCode::MalformedConfig, "unterminated ${ in url template");
    const std::string name(text::trim(tmpl.substr(open + 2, close - open - 2)));
    auto it = bindings.find(name);
    if (it == bindings.end()) throw Error(ErrorCode::UnboundVariable, "variable '" + name + "' is not bound");
    out += url_escape(value_text(it->second));
    i = close + 1;
  }
  return out;
}

namespace detail {

inline Value evaluate(const Processor& p, ExecutionContext& ctx, const Fetcher& fetcher, Charset charset) {
  return std::visit(
      [&](const auto& op) -> Value {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, ConstText>) {
          return op.text;
        } else if constexpr (std::is_same_v<T, VarRef>) {
          const auto* v = ctx.get(op.name);
          if (!v) throw Error(ErrorCode::UnboundVariable, "variable '" + op.name + "' is not bound");
          return *v;
        } else if constexpr (std::is_same_v<T, Http>) {
          const auto url = substitute(op.url_template, ctx.bindings);
          ctx.requested_urls.push_back(url);
          if (!fetcher) throw Error(ErrorCode::FetchFailed, url + ": no fetcher configured");
          auto body = fetcher(url);
          return charset == Charset::Latin1 ? text::latin1_to_utf8(body) : body;
        } else if constexpr (std::is_same_v<T, HtmlToXml>) {
          auto inner = evaluate(*op.inner, ctx, fetcher, charset);
          const auto* s = std::get_if<std::string>(&inner);
          if (!s) throw Error(ErrorCode::TypeMismatch, "html-to-xml expects text, got XML nodes");
          return html::html_to_xml(*s);
        } else {
          static_assert(std::is_same_v<T, XPath>);
          auto inner = evaluate(*op.inner, ctx, fetcher, charset);
          const auto* nodes = std::get_if<xml::NodeList>(&inner);
          if (!nodes) throw Error(ErrorCode::TypeMismatch, "xpath '" + op.expression + "' applied to text; convert it with html-to-xml first");
          try {
            return xpath::eval(*nodes, op.expression);
          } catch (const Error& e) {
            throw Error(ErrorCode::XPathError, std::string(e.name()) + ": " + e.detail());
          }
        }
      },
      p.op);
}

}  // namespace detail

// Runs the var-defs in order. Params are bound first; a var-def with
// overwrite="false" keeps a binding supplied by the caller.
inline ExecutionContext execute(const WrapperConfig& config, const std::map<std::string, std::string>& params,
                                const Fetcher& fetcher) {
  const auto charset = charset_of(config.charset);
  ExecutionContext ctx;
  for (const auto& [k, v] : params) ctx.bindings[k] = v;
  for (const auto& def : config.var_defs) {
    if (!def.overwrite && ctx.bindings.count(def.name)) continue;
    ctx.bindings[def.name] = def.pipeline ? detail::evaluate(*def.pipeline, ctx, fetcher, charset) : Value{std::string{}};
  }
  return ctx;
}

inline std::string serialize_value(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  std::string out;
  for (const auto& n : std::get<xml::NodeList>(v)) out += xml::to_string(*n);
  return out;
}

// ---------------------------------------------------------------------------
// Result mapping: which bound variables hold record fields. "results1" takes
// each node's whitespace-collapsed text, "results1@href" an attribute. Lists
// are zipped by index against the title list.

struct FieldSource {
  std::string variable;
  std::optional<std::string> attribute;

  static FieldSource parse(std::string_view spec) {
    FieldSource f;
    const auto at = spec.find('@');
    f.variable = std::string(text::trim(spec.substr(0, at)));
    if (at != std::string_view::npos) f.attribute = std::string(text::trim(spec.substr(at + 1)));
    if (f.variable.empty() || (f.attribute && f.attribute->empty()))
      throw Error(ErrorCode::ConfigError, "bad field mapping '" + std::string(spec) + "'");
    return f;
  }

  std::vector<std::string> values(const ExecutionContext& ctx) const {
    const auto* v = ctx.get(variable);
    if (!v) return {};
    std::vector<std::string> out;
    if (const auto* s = std::get_if<std::string>(v)) {
      if (attribute) throw Error(ErrorCode::TypeMismatch, "attribute mapping on text variable '" + variable + "'");
      if (!text::trim(*s).empty()) out.push_back(text::collapse_whitespace(*s));
      return out;
    }
    for (const auto& n : std::get<xml::NodeList>(*v))
      out.push_back(attribute ? n->attribute_or(*attribute) : text::collapse_whitespace(n->text_content()));
    return out;
  }
};

struct ResultMapping {
  std::map<std::string, FieldSource> fields;  // field name -> source

  static const std::vector<std::string>& known_fields() {
    static const std::vector<std::string> f = {"title", "url", "authors", "venue", "date", "abstract", "snippet"};
    return f;
  }

  static ResultMapping from(const std::map<std::string, std::string>& spec) {
    ResultMapping m;
    for (const auto& [field, src] : spec) {
      if (std::find(known_fields().begin(), known_fields().end(), field) == known_fields().end())
        throw Error(ErrorCode::ConfigError, "unknown result field '" + field + "'");
      m.fields.emplace(field, FieldSource::parse(src));
    }
    if (!m.fields.count("title")) throw Error(ErrorCode::ConfigError, "result mapping needs a title field");
    return m;
  }

  // Mapping may only reference variables the config binds.
  void validate_against(const WrapperConfig& cfg) const {
    for (const auto& [field, src] : fields)
      if (!cfg.find(src.variable))
        throw Error(ErrorCode::ConfigError,
                    "field '" + field + "' maps variable '" + src.variable + "' which the config never binds");
  }

  std::vector<std::string> column(const ExecutionContext& ctx, const std::string& field) const {
    auto it = fields.find(field);
    return it == fields.end() ? std::vector<std::string>{} : it->second.values(ctx);
  }
};

inline std::optional<int> extract_year(std::string_view s) {
  for (std::size_t i = 0; i + 4 <= s.size(); ++i) {
    bool digits = true;
    for (std::size_t k = 0; k < 4; ++k) digits = digits && s[i + k] >= '0' && s[i + k] <= '9';
    const bool left_ok = i == 0 || !(s[i - 1] >= '0' && s[i - 1] <= '9');
    const bool right_ok = i + 4 == s.size() || !(s[i + 4] >= '0' && s[i + 4] <= '9');
    if (digits && left_ok && right_ok) {
      const int y = std::stoi(std::string(s.substr(i, 4)));
      if (valid_year(y)) return y;
    }
  }
  return std::nullopt;
}

inline std::vector<std::string> split_authors(std::string_view s) {
  std::vector<std::string> out;
  std::string norm(s);
  for (const auto* sep : {" and ", ";"}) {
    std::size_t p;
    while ((p = norm.find(sep)) != std::string::npos) norm.replace(p, std::string_view(sep).size(), ",");
  }
  std::size_t start = 0;
  while (start <= norm.size()) {
    auto comma = norm.find(',', start);
    if (comma == std::string::npos) comma = norm.size();
    auto name = text::collapse_whitespace(norm.substr(start, comma - start));
    if (!name.empty()) out.push_back(std::move(name));
    start = comma + 1;
  }
  return out;
}

inline std::vector<PublicationRecord> records_from(const ExecutionContext& ctx, const ResultMapping& mapping,
                                                   const std::string& source_id) {
  const auto titles = mapping.column(ctx, "title");
  const auto urls = mapping.column(ctx, "url");
  const auto authors = mapping.column(ctx, "authors");
  const auto venues = mapping.column(ctx, "venue");
  const auto dates = mapping.column(ctx, "date");
  auto abstracts = mapping.column(ctx, "abstract");
  if (abstracts.empty()) abstracts = mapping.column(ctx, "snippet");
  const auto at = [](const std::vector<std::string>& col, std::size_t i) -> std::string {
    return i < col.size() ? col[i] : std::string{};
  };
  std::vector<PublicationRecord> out;
  for (std::size_t i = 0; i < titles.size(); ++i) {
    if (titles[i].empty()) continue;
    PublicationRecord r;
    r.title = titles[i];
    r.source_id = source_id;
    r.source_rank = out.size() + 1;
    r.authors = split_authors(at(authors, i));
    r.venue_raw = at(venues, i);
    r.date = extract_year(at(dates, i));
    if (auto u = at(urls, i); !u.empty()) r.url = u;
    if (auto a = at(abstracts, i); !a.empty()) r.abstract = a;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mindforge::wrapper
