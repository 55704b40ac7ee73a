#pragma once

// Facet grouping of result lists and conversion of chosen results into
// mindmap subtrees.

#include <algorithm>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mindforge/error.hpp"
#include "mindforge/mindmap.hpp"
#include "mindforge/orchestrator.hpp"
#include "mindforge/record.hpp"
#include "mindforge/text.hpp"

namespace mindforge {

inline constexpr std::string_view kOtherLabel = "other";

enum class FacetField { Date, Forum, Author, Title, Venue, Abstract, Url };

inline std::optional<FacetField> facet_field_from_name(std::string_view s) {
  static const std::map<std::string, FacetField, std::less<>> names = {
      {"date", FacetField::Date},   {"year", FacetField::Date},         {"forum", FacetField::Forum},
      {"author", FacetField::Author}, {"authors", FacetField::Author}, {"title", FacetField::Title},
      {"venue", FacetField::Venue}, {"abstract", FacetField::Abstract}, {"url", FacetField::Url},
  };
  auto it = names.find(text::casefold(s));
  if (it == names.end()) return std::nullopt;
  return it->second;
}

struct FacetSpec {
  FacetField field = FacetField::Date;
  std::optional<std::string> pattern;  // set for regex facets

  static FacetSpec by(FacetField f) { return {f, std::nullopt}; }
  static FacetSpec regex(FacetField f, std::string pattern) { return {f, std::move(pattern)}; }

  // "date", "forum", "author", or "regex:<field>:<pattern>".
  static FacetSpec parse(std::string_view s) {
    if (s.substr(0, 6) == "regex:") {
      const auto rest = s.substr(6);
      const auto colon = rest.find(':');
      if (colon == std::string_view::npos)
        throw Error(ErrorCode::BadRequest, "regex facet must be regex:<field>:<pattern>");
      const auto f = facet_field_from_name(rest.substr(0, colon));
      if (!f) throw Error(ErrorCode::BadRequest, "unknown facet field '" + std::string(rest.substr(0, colon)) + "'");
      return regex(*f, std::string(rest.substr(colon + 1)));
    }
    const auto f = facet_field_from_name(s);
    if (!f || (*f != FacetField::Date && *f != FacetField::Forum && *f != FacetField::Author))
      throw Error(ErrorCode::BadRequest, "unknown facet '" + std::string(s) + "'");
    return by(*f);
  }
};

struct ResultGroup {
  std::string label;
  std::vector<PublicationRecord> records;
};

// Lookaround and back-references are outside the supported dialect.
inline std::regex compile_facet_regex(const std::string& pattern) {
  if (pattern.find("(?") != std::string::npos)
    throw Error(ErrorCode::InvalidRegex, "lookaround and non-capturing groups are not supported: " + pattern);
  for (std::size_t i = 0; i + 1 < pattern.size(); ++i) {
    if (pattern[i] == '\\' && pattern[i + 1] >= '1' && pattern[i + 1] <= '9')
      throw Error(ErrorCode::InvalidRegex, "back-references are not supported: " + pattern);
    if (pattern[i] == '\\') ++i;
  }
  try {
    return std::regex(pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::InvalidRegex, "'" + pattern + "': " + e.what());
  }
}

inline std::string field_text(const PublicationRecord& r, FacetField f) {
  switch (f) {
    case FacetField::Date: return r.date ? std::to_string(*r.date) : "";
    case FacetField::Forum: return r.venue_norm ? r.venue_norm->acronym : "";
    case FacetField::Author: {
      std::string s;
      for (const auto& a : r.authors) s += (s.empty() ? "" : ", ") + a;
      return s;
    }
    case FacetField::Title: return r.title;
    case FacetField::Venue: return r.venue_raw;
    case FacetField::Abstract: return r.abstract.value_or("");
    case FacetField::Url: return r.url.value_or("");
  }
  return "";
}

inline std::vector<ResultGroup> group_results(const std::vector<PublicationRecord>& records, const FacetSpec& facet) {
  std::map<std::string, std::vector<PublicationRecord>> groups;
  const std::string other(kOtherLabel);

  if (facet.pattern) {
    const auto re = compile_facet_regex(*facet.pattern);
    for (const auto& r : records) {
      const auto s = field_text(r, facet.field);
      std::smatch m;
      if (std::regex_search(s, m, re))
        groups[m.size() > 1 && m[1].matched ? m[1].str() : m[0].str()].push_back(r);
      else
        groups[other].push_back(r);
    }
  } else if (facet.field == FacetField::Author) {
    for (const auto& r : records) {
      std::vector<std::string> seen;
      for (const auto& a : r.authors) {
        const auto name = text::collapse_whitespace(a);
        if (name.empty() || std::find(seen.begin(), seen.end(), name) != seen.end()) continue;
        seen.push_back(name);
        groups[name].push_back(r);
      }
      if (seen.empty()) groups[other].push_back(r);
    }
  } else {
    for (const auto& r : records) {
      auto label = field_text(r, facet.field);
      groups[label.empty() ? other : label].push_back(r);
    }
  }

  std::vector<ResultGroup> out;
  for (auto& [label, rs] : groups) out.push_back({label, std::move(rs)});
  return out;
}

// Topic node titled after the record with a Link child for the record url,
// a Detail child for the abstract, and one child per supporting material.
inline MindmapNode build_mm_subtree(const PublicationRecord& record, const std::vector<SupportMaterial>& materials,
                                    IdGenerator& ids) {
  if (text::trim(record.title).empty()) throw Error(ErrorCode::PreconditionFailed, "record has no title");
  std::unordered_set<std::string> used;
  const auto fresh = [&] {
    auto id = ids.next();
    while (!used.insert(id).second) id = ids.next();
    return id;
  };

  MindmapNode root;
  root.id = fresh();
  root.text = record.title;
  root.kind = ElementKind::Topic;

  if (record.url) {
    MindmapNode link;
    link.id = fresh();
    link.text = *record.url;
    link.link = *record.url;
    link.kind = ElementKind::Link;
    root.children.push_back(std::move(link));
  }
  const auto add_detail = [&](const std::string& body) {
    MindmapNode d;
    d.id = fresh();
    d.text = "Abstract";
    d.detail_note = body;
    d.kind = ElementKind::Detail;
    root.children.push_back(std::move(d));
  };
  if (record.abstract && !text::trim(*record.abstract).empty()) add_detail(*record.abstract);

  for (const auto& m : materials) {
    if (m.kind == MaterialKind::Abstract) {
      if (!m.text || text::trim(*m.text).empty()) continue;
      if (record.abstract && *record.abstract == *m.text) continue;
      add_detail(*m.text);
      continue;
    }
    if (!m.url) continue;
    MindmapNode n;
    n.id = fresh();
    n.text = std::string(material_name(m.kind));
    n.link = *m.url;
    n.kind = ElementKind::Link;
    root.children.push_back(std::move(n));
  }
  return root;
}

// Identity of an imported subtree: its record url (first Link child) or,
// failing that, its canonical title.
inline std::string subtree_key(const MindmapNode& n) {
  for (const auto& c : n.children)
    if (c.kind == ElementKind::Link && c.link && c.text == *c.link) return "url:" + *c.link;
  return "title:" + text::canonical(n.text);
}

struct ImportStats {
  std::size_t attached = 0;
  std::size_t skipped = 0;
};

inline Mindmap import_results(Mindmap map, std::string_view target_id, const std::vector<MindmapNode>& subtrees,
                              ImportStats* stats = nullptr) {
  const auto* target = find_node(map.root, target_id);
  if (!target) throw Error(ErrorCode::UnknownNode, "no node with id '" + std::string(target_id) + "'");
  std::unordered_set<std::string> present;
  for (const auto& c : target->children) present.insert(subtree_key(c));
  ImportStats local;
  for (const auto& s : subtrees) {
    if (!present.insert(subtree_key(s)).second) {
      ++local.skipped;
      continue;
    }
    map = attach_subtree(std::move(map), target_id, s);
    ++local.attached;
  }
  validate(map);
  if (stats) *stats = local;
  return map;
}

}  // namespace mindforge
