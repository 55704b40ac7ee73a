#pragma once

// FreeMind (.mm) mindmap model: parse, serialize, locate and graft.
//
// Supported subset: map, node (ID, TEXT, LINK, CREATED, MODIFIED), icon
// (BUILTIN), cloud, richcontent TYPE="NOTE" (as plain-text detail note) and
// TYPE="NODE" (used for text when TEXT is absent). Anything else is
// dropped with a warning.
//
// FreeMind does not store element kinds. They are inferred from icons and
// node content, see infer_kind(). When a node's kind disagrees with what
// inference would produce, the serializer records it in a FreeMind
// attribute named "kind" so the map round-trips.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mindforge/error.hpp"
#include "mindforge/text.hpp"
#include "mindforge/xml.hpp"

namespace mindforge {

enum class ElementKind {
  Topic,
  LargerTopic,
  WaitingTopic,
  NeedsAction,
  Hot,
  Detail,
  Link,
  KeywordsObject,
  CodeObject,
  Question,
  Cloud,
};

inline constexpr std::array<ElementKind, 11> kAllKinds = {
    ElementKind::Topic,          ElementKind::LargerTopic, ElementKind::WaitingTopic,
    ElementKind::NeedsAction,    ElementKind::Hot,         ElementKind::Detail,
    ElementKind::Link,           ElementKind::KeywordsObject, ElementKind::CodeObject,
    ElementKind::Question,       ElementKind::Cloud,
};

constexpr std::string_view kind_name(ElementKind k) {
  switch (k) {
    case ElementKind::Topic: return "Topic";
    case ElementKind::LargerTopic: return "LargerTopic";
    case ElementKind::WaitingTopic: return "WaitingTopic";
    case ElementKind::NeedsAction: return "NeedsAction";
    case ElementKind::Hot: return "Hot";
    case ElementKind::Detail: return "Detail";
    case ElementKind::Link: return "Link";
    case ElementKind::KeywordsObject: return "KeywordsObject";
    case ElementKind::CodeObject: return "CodeObject";
    case ElementKind::Question: return "Question";
    case ElementKind::Cloud: return "Cloud";
  }
  return "Topic";
}

inline std::optional<ElementKind> kind_from_name(std::string_view name) {
  for (auto k : kAllKinds)
    if (kind_name(k) == name) return k;
  return std::nullopt;
}

// Icon -> kind convention. Blue and green flags are selection markers and
// carry no kind signal.
inline std::optional<ElementKind> kind_for_icon(std::string_view icon) {
  static const std::map<std::string, ElementKind, std::less<>> table = {
      {"idea", ElementKind::Topic},
      {"flag", ElementKind::Topic},
      {"flag-black", ElementKind::Topic},
      {"flag-orange", ElementKind::Topic},
      {"flag-pink", ElementKind::Topic},
      {"flag-yellow", ElementKind::Topic},
      {"full-1", ElementKind::LargerTopic},
      {"hourglass", ElementKind::WaitingTopic},
      {"clock", ElementKind::WaitingTopic},
      {"bell", ElementKind::NeedsAction},
      {"pencil", ElementKind::NeedsAction},
      {"messagebox_warning", ElementKind::Hot},
      {"yes", ElementKind::Hot},
      {"info", ElementKind::Detail},
      {"attach", ElementKind::Link},
      {"xmag", ElementKind::KeywordsObject},
      {"list", ElementKind::KeywordsObject},
      {"launch", ElementKind::CodeObject},
      {"help", ElementKind::Question},
  };
  if (auto it = table.find(icon); it != table.end()) return it->second;
  return std::nullopt;
}

inline constexpr std::string_view kSelectedFlag = "flag-blue";
inline constexpr std::string_view kIncludedFlag = "flag-green";

struct MindmapNode {
  std::string id;
  std::string text;
  ElementKind kind = ElementKind::Topic;
  std::vector<std::string> icons;
  std::optional<std::string> link;
  std::optional<std::string> detail_note;
  bool cloud = false;
  std::optional<std::string> created;
  std::optional<std::string> modified;
  std::vector<MindmapNode> children;
};

// First icon with a kind mapping wins; otherwise a note makes a Detail,
// a bare link a Link, a cloud a Cloud, and everything else a Topic.
inline ElementKind infer_kind(const MindmapNode& n) {
  for (const auto& icon : n.icons)
    if (auto k = kind_for_icon(icon)) return *k;
  if (n.detail_note) return ElementKind::Detail;
  if (n.link) return ElementKind::Link;
  if (n.cloud) return ElementKind::Cloud;
  return ElementKind::Topic;
}

struct Mindmap {
  MindmapNode root;
  std::optional<std::string> source_path;
  std::string format_version = "1.0.1";
};

// Equality over id, text, kind, icons, link, note, cloud and child order.
inline bool structurally_equal(const MindmapNode& a, const MindmapNode& b) {
  if (a.id != b.id || a.text != b.text || a.kind != b.kind || a.icons != b.icons ||
      a.link != b.link || a.detail_note != b.detail_note || a.cloud != b.cloud ||
      a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!structurally_equal(a.children[i], b.children[i])) return false;
  return true;
}

inline bool structurally_equal(const Mindmap& a, const Mindmap& b) {
  return structurally_equal(a.root, b.root);
}

template <typename Fn>
void for_each_node(const MindmapNode& n, Fn&& fn, int depth = 0) {
  fn(n, depth);
  for (const auto& c : n.children) for_each_node(c, fn, depth + 1);
}

inline std::size_t node_count(const MindmapNode& n) {
  std::size_t count = 0;
  for_each_node(n, [&](const MindmapNode&, int) { ++count; });
  return count;
}

inline const MindmapNode* find_node(const MindmapNode& n, std::string_view id) {
  if (n.id == id) return &n;
  for (const auto& c : n.children)
    if (const auto* hit = find_node(c, id)) return hit;
  return nullptr;
}

inline MindmapNode* find_node(MindmapNode& n, std::string_view id) {
  return const_cast<MindmapNode*>(find_node(std::as_const(n), id));
}

inline const MindmapNode* find_node(const Mindmap& m, std::string_view id) {
  return find_node(m.root, id);
}

inline std::vector<std::string> collect_ids(const MindmapNode& n) {
  std::vector<std::string> ids;
  for_each_node(n, [&](const MindmapNode& x, int) { ids.push_back(x.id); });
  return ids;
}

// Parent id for every non-root node.
inline std::map<std::string, std::string> parent_index(const Mindmap& m) {
  std::map<std::string, std::string> parents;
  std::function<void(const MindmapNode&)> walk = [&](const MindmapNode& n) {
    for (const auto& c : n.children) {
      parents.emplace(c.id, n.id);
      walk(c);
    }
  };
  walk(m.root);
  return parents;
}

// Throws DuplicateId or PreconditionFailed (empty id) when the tree
// invariants do not hold.
inline void validate(const Mindmap& m) {
  std::unordered_set<std::string> seen;
  for_each_node(m.root, [&](const MindmapNode& n, int) {
    if (n.id.empty()) throw Error(ErrorCode::PreconditionFailed, "node with empty id");
    if (!seen.insert(n.id).second) throw Error(ErrorCode::DuplicateId, "duplicate node id '" + n.id + "'");
  });
}

namespace detail {

inline std::string note_from_html(const xml::Node& rich) {
  // Each block-level element becomes one line; whitespace inside a block is
  // collapsed as a browser would.
  std::vector<std::string> lines;
  std::function<void(const xml::Node&)> walk = [&](const xml::Node& n) {
    static const std::set<std::string, std::less<>> blocks = {"p", "div", "li", "h1", "h2",
                                                              "h3", "h4", "pre"};
    bool has_block_child = false;
    for (const auto& c : n.children)
      if (c->is_element() && blocks.count(c->name)) has_block_child = true;
    if (!has_block_child) {
      auto line = text::collapse_whitespace(n.text_content());
      if (!line.empty()) lines.push_back(std::move(line));
      return;
    }
    for (const auto& c : n.children)
      if (c->is_element()) walk(*c);
  };
  const xml::Node* body = &rich;
  for (const auto& html : rich.elements("html"))
    for (const auto& b : html->elements("body")) body = b.get();
  walk(*body);
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

class MindmapReader {
 public:
  MindmapNode read(const xml::Node& map) {
    const auto nodes = map.elements("node");
    if (nodes.size() != 1)
      throw Error(ErrorCode::NotAMindmap,
                  "map must contain exactly one root node, found " + std::to_string(nodes.size()));
    for (const auto& c : map.children)
      if (c->is_element() && c->name != "node") dropped(c->name);
    collect_explicit(*nodes.front());
    return read_node(*nodes.front());
  }

 private:
  std::unordered_set<std::string> explicit_ids_;
  std::unordered_set<std::string> assigned_;
  std::set<std::string> warned_;
  std::size_t preorder_ = 0;

  void dropped(const std::string& element) {
    if (warned_.insert(element).second) warn("mindmap: dropping unsupported element <" + element + ">");
  }

  void collect_explicit(const xml::Node& n) {
    if (const auto* id = n.attribute("ID")) explicit_ids_.insert(*id);
    for (const auto& c : n.elements("node")) collect_explicit(*c);
  }

  std::string synthesize_id() {
    std::string id = "ID_" + std::to_string(preorder_);
    while (explicit_ids_.count(id) || assigned_.count(id)) id += "_";
    return id;
  }

  MindmapNode read_node(const xml::Node& el) {
    MindmapNode node;
    if (const auto* id = el.attribute("ID"); id && !id->empty())
      node.id = *id;
    else
      node.id = synthesize_id();
    ++preorder_;
    if (!assigned_.insert(node.id).second)
      throw Error(ErrorCode::DuplicateId, "duplicate node id '" + node.id + "'");
    const auto* text_attr = el.attribute("TEXT");
    if (text_attr) node.text = *text_attr;
    if (const auto* link = el.attribute("LINK")) node.link = *link;
    if (const auto* c = el.attribute("CREATED")) node.created = *c;
    if (const auto* m = el.attribute("MODIFIED")) node.modified = *m;

    std::optional<ElementKind> explicit_kind;
    for (const auto& child : el.children) {
      if (!child->is_element()) continue;
      const auto& name = child->name;
      if (name == "node") {
        node.children.push_back(read_node(*child));
      } else if (name == "icon") {
        if (const auto* b = child->attribute("BUILTIN")) node.icons.push_back(*b);
      } else if (name == "cloud") {
        node.cloud = true;
      } else if (name == "richcontent") {
        const auto type = child->attribute_or("TYPE");
        if (type == "NOTE") {
          node.detail_note = note_from_html(*child);
        } else if (type == "NODE" && !text_attr) {
          node.text = note_from_html(*child);
        } else {
          dropped("richcontent TYPE=" + type);
        }
      } else if (name == "attribute" && child->attribute_or("NAME") == "kind") {
        explicit_kind = kind_from_name(child->attribute_or("VALUE"));
        if (!explicit_kind) warn("mindmap: unknown kind '" + child->attribute_or("VALUE") + "'");
      } else {
        dropped(name);
      }
    }
    node.kind = explicit_kind.value_or(infer_kind(node));
    return node;
  }
};

inline void write_node(std::string& out, const MindmapNode& n, int depth) {
  const std::string indent(static_cast<std::size_t>(depth), ' ');
  out += indent + "<node ID=\"" + xml::escape(n.id, true) + "\"";
  if (n.created) out += " CREATED=\"" + xml::escape(*n.created, true) + "\"";
  if (n.modified) out += " MODIFIED=\"" + xml::escape(*n.modified, true) + "\"";
  if (n.link) out += " LINK=\"" + xml::escape(*n.link, true) + "\"";
  out += " TEXT=\"" + xml::escape(n.text, true) + "\"";
  const bool needs_kind = infer_kind(n) != n.kind;
  const bool empty = n.children.empty() && n.icons.empty() && !n.cloud && !n.detail_note && !needs_kind;
  if (empty) {
    out += "/>\n";
    return;
  }
  out += ">\n";
  if (n.cloud) out += indent + " <cloud/>\n";
  for (const auto& icon : n.icons) out += indent + " <icon BUILTIN=\"" + xml::escape(icon, true) + "\"/>\n";
  if (needs_kind)
    out += indent + " <attribute NAME=\"kind\" VALUE=\"" + std::string(kind_name(n.kind)) + "\"/>\n";
  if (n.detail_note) {
    out += indent + " <richcontent TYPE=\"NOTE\"><html><head></head><body>";
    for (auto line : text::split_lines(*n.detail_note)) out += "<p>" + xml::escape(line) + "</p>";
    out += "</body></html></richcontent>\n";
  }
  for (const auto& c : n.children) write_node(out, c, depth + 1);
  out += indent + "</node>\n";
}

}  // namespace detail

inline Mindmap parse_mindmap(std::string_view xml_text) {
  const auto doc = xml::parse(xml_text);
  if (doc->name != "map")
    throw Error(ErrorCode::NotAMindmap, "document element is <" + doc->name + ">, expected <map>");
  Mindmap m;
  m.format_version = doc->attribute_or("version", "1.0.1");
  m.root = detail::MindmapReader{}.read(*doc);
  return m;
}

inline std::string serialize_mindmap(const Mindmap& m) {
  std::string out = "<map version=\"" + xml::escape(m.format_version, true) + "\">\n";
  out += "<!-- To view this file, download free mind mapping software FreeMind from "
         "http://freemind.sourceforge.net -->\n";
  detail::write_node(out, m.root, 0);
  out += "</map>\n";
  return out;
}

// Appends `subtree` as the last child of `parent_id`. Returns a new map.
inline Mindmap attach_subtree(Mindmap map, std::string_view parent_id, MindmapNode subtree) {
  auto* parent = find_node(map.root, parent_id);
  if (!parent) throw Error(ErrorCode::UnknownNode, "no node with id '" + std::string(parent_id) + "'");
  std::unordered_set<std::string> existing;
  for (auto& id : collect_ids(map.root)) existing.insert(std::move(id));
  std::unordered_set<std::string> incoming;
  for (const auto& id : collect_ids(subtree)) {
    if (existing.count(id)) throw Error(ErrorCode::IdCollision, "subtree id '" + id + "' already in map");
    if (!incoming.insert(id).second) throw Error(ErrorCode::DuplicateId, "subtree repeats id '" + id + "'");
  }
  parent->children.push_back(std::move(subtree));
  return map;
}

// Fresh FreeMind-style ids ("ID_" + digits).
class IdGenerator {
 public:
  IdGenerator() : rng_(std::random_device{}()) {}
  explicit IdGenerator(std::uint64_t seed) : rng_(seed) {}

  std::string next() {
    std::uniform_int_distribution<std::uint64_t> dist(100000000ULL, 9999999999ULL);
    return "ID_" + std::to_string(dist(rng_));
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace mindforge
