#pragma once

// Workbench: the service state behind the HTTP API (current mindmap, venue
// catalog, adapters, search sessions) and the JSON request handlers. The
// HTTP layer only routes and maps errors to status codes.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mindforge/config.hpp"
#include "mindforge/dedup.hpp"
#include "mindforge/error.hpp"
#include "mindforge/expansion.hpp"
#include "mindforge/fetch.hpp"
#include "mindforge/mindmap.hpp"
#include "mindforge/orchestrator.hpp"
#include "mindforge/organizer.hpp"
#include "mindforge/venue.hpp"
#include "mindforge/wrapper.hpp"

namespace mindforge {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON views

inline json node_to_json(const MindmapNode& n) {
  json j = {{"id", n.id}, {"text", n.text}, {"kind", kind_name(n.kind)}, {"icons", n.icons}};
  j["link"] = n.link ? json(*n.link) : json(nullptr);
  if (n.detail_note) j["note"] = *n.detail_note;
  if (n.cloud) j["cloud"] = true;
  j["children"] = json::array();
  for (const auto& c : n.children) j["children"].push_back(node_to_json(c));
  return j;
}

inline MindmapNode node_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::BadRequest, "node must be an object");
  MindmapNode n;
  n.id = j.value("id", "");
  if (n.id.empty()) throw Error(ErrorCode::BadRequest, "node without id");
  n.text = j.value("text", "");
  if (j.contains("icons")) n.icons = j["icons"].get<std::vector<std::string>>();
  if (j.contains("link") && j["link"].is_string()) n.link = j["link"].get<std::string>();
  if (j.contains("note") && j["note"].is_string()) n.detail_note = j["note"].get<std::string>();
  n.cloud = j.value("cloud", false);
  if (j.contains("kind") && j["kind"].is_string()) {
    const auto k = kind_from_name(j["kind"].get<std::string>());
    if (!k) throw Error(ErrorCode::BadRequest, "unknown kind '" + j["kind"].get<std::string>() + "'");
    n.kind = *k;
  } else {
    n.kind = infer_kind(n);
  }
  if (j.contains("children"))
    for (const auto& c : j["children"]) n.children.push_back(node_from_json(c));
  return n;
}

inline json record_to_json(const PublicationRecord& r) {
  json j = {{"title", r.title}, {"authors", r.authors}, {"venue_raw", r.venue_raw},
            {"source_id", r.source_id}, {"source_rank", r.source_rank}};
  j["venue_norm"] = r.venue_norm ? json{{"acronym", r.venue_norm->acronym}, {"title", r.venue_norm->title}} : json(nullptr);
  j["date"] = r.date ? json(*r.date) : json(nullptr);
  j["url"] = r.url ? json(*r.url) : json(nullptr);
  j["abstract"] = r.abstract ? json(*r.abstract) : json(nullptr);
  return j;
}

inline PublicationRecord record_from_json(const json& j) {
  PublicationRecord r;
  r.title = j.value("title", "");
  if (j.contains("authors") && j["authors"].is_array()) r.authors = j["authors"].get<std::vector<std::string>>();
  r.venue_raw = j.value("venue_raw", j.value("venue", ""));
  if (j.contains("venue_norm") && j["venue_norm"].is_object())
    r.venue_norm = VenueEntry{j["venue_norm"].value("acronym", ""), j["venue_norm"].value("title", "")};
  if (j.contains("date") && j["date"].is_number_integer()) r.date = j["date"].get<int>();
  else if (j.contains("date") && j["date"].is_string()) r.date = wrapper::extract_year(j["date"].get<std::string>());
  if (j.contains("url") && j["url"].is_string()) r.url = j["url"].get<std::string>();
  if (j.contains("abstract") && j["abstract"].is_string()) r.abstract = j["abstract"].get<std::string>();
  r.source_id = j.value("source_id", "");
  r.source_rank = j.value("source_rank", std::size_t{0});
  return r;
}

inline json material_to_json(const SupportMaterial& m) {
  json j = {{"kind", material_name(m.kind)}, {"verified", m.verified}, {"evidence", m.evidence}};
  j["url"] = m.url ? json(*m.url) : json(nullptr);
  j["text"] = m.text ? json(*m.text) : json(nullptr);
  if (!m.section_terms.empty()) j["section_terms"] = m.section_terms;
  return j;
}

inline json error_json(const Error& e) {
  return {{"error", {{"code", std::string(e.name())}, {"message", e.detail()}}}};
}

inline int http_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::UnknownNode:
    case ErrorCode::UnknownTask:
    case ErrorCode::UnknownSource:
    case ErrorCode::NoCandidates:
    case ErrorCode::AbstractNotFound: return 404;
    case ErrorCode::AllSourcesFailed:
    case ErrorCode::FetchFailed: return 502;
    case ErrorCode::IoError:
    case ErrorCode::ConfigError: return 500;
    default: return 400;
  }
}

// ---------------------------------------------------------------------------

struct SearchSession {
  std::string task_id;
  SearchTask task;
  std::vector<PublicationRecord> records;
  std::map<std::size_t, std::vector<SupportMaterial>> support;
  std::vector<SourceStatus> diagnostics;
  DedupStats dedup;
};

class Workbench {
 public:
  // Fetcher and extractor come from the config: fixtures when
  // fixtures_dir is set, live HTTP otherwise.
  explicit Workbench(ServiceConfig cfg) : Workbench(cfg, default_fetcher(cfg), default_extractor(cfg)) {}

  Workbench(ServiceConfig cfg, wrapper::Fetcher fetcher, std::shared_ptr<TextExtractor> extractor)
      : cfg_(std::move(cfg)), fetcher_(std::move(fetcher)), extractor_(std::move(extractor)) {
    cfg_.validate();
    map_ = load_map(cfg_.mindmap_path);
    catalog_ = VenueCatalog::load(cfg_.catalog_path);
    stopwords_ = StopwordList::load(cfg_.stopword_path);
    weights_ = cfg_.weights();
    for (const auto& s : cfg_.sources) {
      auto wc = load_wrapper(s.config_path);
      auto mapping = wrapper::ResultMapping::from(s.result_mapping);
      registry_.add({s.name, s.priority, std::make_shared<WrapperSource>(s.name, std::move(wc), std::move(mapping), fetcher_)});
    }
    if (cfg_.horizontal) horizontal_ = make_engine(*cfg_.horizontal);
    if (cfg_.blog) blog_ = make_engine(*cfg_.blog);
  }

  const ServiceConfig& config() const { return cfg_; }

  Mindmap mindmap() const {
    std::shared_lock lock(map_mutex_);
    return map_;
  }

  json mindmap_json() const {
    std::shared_lock lock(map_mutex_);
    return {{"format_version", map_.format_version}, {"root", node_to_json(map_.root)}};
  }

  // Body is either FreeMind XML or the JSON tree ({"root": node} or a node).
  json put_mindmap(const std::string& body) {
    Mindmap m;
    const auto first = body.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && body[first] == '<') {
      m = parse_mindmap(body);
    } else {
      const auto j = parse_body(body);
      m.root = node_from_json(j.contains("root") ? j["root"] : j);
      validate(m);
    }
    std::unique_lock lock(map_mutex_);
    m.source_path = map_.source_path;
    map_ = std::move(m);
    return {{"ok", true}, {"node_count", node_count(map_.root)}};
  }

  // Write to a sibling temp file, then rename over the target.
  json save() const {
    std::string content;
    {
      std::shared_lock lock(map_mutex_);
      content = serialize_mindmap(map_);
    }
    const std::filesystem::path target(cfg_.mindmap_path);
    auto tmp = target;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
      out << content;
      if (!out.flush()) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw Error(ErrorCode::IoError, "rename " + tmp.string() + ": " + ec.message());
    return {{"ok", true}, {"path", target.string()}, {"bytes", content.size()}};
  }

  json preview(const json& req) const {
    const auto map = mindmap();
    const auto [n, q] = expand(map, req);
    json terms = json::array();
    for (const auto& t : q.expansion_terms) terms.push_back({{"term", t.term}, {"score", t.aggregate}});
    return {{"selected_ids", n.selected_ids}, {"neighbourhood_ids", n.included_ids}, {"base_terms", q.base_terms},
            {"terms", terms}, {"query", q.query_string()}};
  }

  // Runs the vertical search to completion and opens a session for it.
  json start_search(const json& req) {
    const auto map = mindmap();
    SearchTask task;
    task.limit = req.value("limit", cfg_.defaults.limit);
    if (req.contains("selected_ids") && !req["selected_ids"].empty()) {
      task.query = expand(map, req).second;
    } else {
      task.query.base_terms = text::tokenize(req.value("base_query", ""));
      task.query.k = 0;
    }
    if (task.query.terms().empty()) throw Error(ErrorCode::BadRequest, "empty query: give base_query or selected_ids");
    if (req.contains("sources") && !req["sources"].empty()) {
      task.sources = req["sources"].get<std::vector<std::string>>();
    } else {
      for (const auto& s : registry_.all()) task.sources.push_back(s.name);
    }
    task.task_id = "t" + std::to_string(++task_counter_);

    VerticalOptions opts;
    opts.timeout = std::chrono::milliseconds(static_cast<long long>(cfg_.defaults.timeout_s * 1000));
    auto outcome = vertical_search(task, registry_, catalog_, opts);

    auto session = std::make_shared<LockedSession>();
    auto& d = session->data;
    d.task_id = task.task_id;
    d.task = task;
    d.records = std::move(outcome.records);
    d.diagnostics = std::move(outcome.diagnostics);
    d.dedup = outcome.dedup;
    json out = {{"task_id", task.task_id}, {"query", task.query.query_string()}, {"count", d.records.size()},
                {"diagnostics", diagnostics_json(d.diagnostics)}};
    {
      std::lock_guard lock(sessions_mutex_);
      sessions_[task.task_id] = std::move(session);
    }
    return out;
  }

  json results(const std::string& task_id, const std::optional<std::string>& facet) const {
    const auto s = session(task_id);
    std::lock_guard lock(s->mutex);
    json records = json::array();
    for (std::size_t i = 0; i < s->data.records.size(); ++i) {
      auto r = record_to_json(s->data.records[i]);
      r["index"] = i;
      if (auto it = s->data.support.find(i); it != s->data.support.end()) {
        r["support"] = json::array();
        for (const auto& m : it->second) r["support"].push_back(material_to_json(m));
      }
      records.push_back(std::move(r));
    }
    json out = {{"task_id", task_id}, {"query", s->data.task.query.query_string()}, {"records", records},
                {"diagnostics", diagnostics_json(s->data.diagnostics)},
                {"dedup", {{"comparisons", s->data.dedup.comparisons}, {"removed", s->data.dedup.removed}}}};
    if (facet && !facet->empty()) {
      const auto spec = FacetSpec::parse(*facet);
      // group by index so records stay addressable
      std::vector<PublicationRecord> tagged = s->data.records;
      for (std::size_t i = 0; i < tagged.size(); ++i) tagged[i].source_rank = i;
      json groups = json::array();
      for (const auto& g : group_results(tagged, spec)) {
        std::vector<std::size_t> idx;
        for (const auto& r : g.records) idx.push_back(r.source_rank);
        groups.push_back({{"label", g.label}, {"indices", idx}});
      }
      out["facet"] = *facet;
      out["groups"] = groups;
    }
    return out;
  }

  // Document runs before slides because slide verification uses the
  // document's section headings.
  json support(const std::string& task_id, const json& req) {
    const auto s = session(task_id);
    const auto index = req.value("record_index", std::size_t{0});
    PublicationRecord record;
    std::vector<SupportMaterial> existing;
    {
      std::lock_guard lock(s->mutex);
      if (index >= s->data.records.size())
        throw Error(ErrorCode::BadRequest, "record_index " + std::to_string(index) + " out of range");
      record = s->data.records[index];
      if (auto it = s->data.support.find(index); it != s->data.support.end()) existing = it->second;
    }
    std::set<MaterialKind> kinds;
    if (req.contains("kinds")) {
      for (const auto& k : req["kinds"]) {
        const auto mk = material_from_name(k.get<std::string>());
        if (!mk) throw Error(ErrorCode::BadRequest, "unknown material kind '" + k.get<std::string>() + "'");
        kinds.insert(*mk);
      }
    } else {
      kinds = {MaterialKind::Document, MaterialKind::Abstract, MaterialKind::Slides, MaterialKind::BlogPost};
    }

    std::vector<SupportMaterial> found;
    json errors = json::array();
    const auto attempt = [&](MaterialKind k, auto&& fn) {
      try {
        fn();
      } catch (const Error& e) {
        errors.push_back({{"kind", material_name(k)}, {"code", std::string(e.name())}, {"message", e.detail()}});
      }
    };
    std::optional<SupportMaterial> doc;
    for (const auto& m : existing)
      if (m.kind == MaterialKind::Document) doc = m;
    const bool need_doc = kinds.count(MaterialKind::Document) || kinds.count(MaterialKind::Slides) ||
                          (kinds.count(MaterialKind::Abstract) && !record.abstract);
    if (need_doc && !doc) {
      attempt(MaterialKind::Document, [&] {
        if (!horizontal_) throw Error(ErrorCode::ConfigError, "no horizontal engine configured");
        doc = find_document(record, *horizontal_, *extractor_);
      });
    }
    if (kinds.count(MaterialKind::Document) && doc) found.push_back(*doc);
    if (kinds.count(MaterialKind::Abstract))
      attempt(MaterialKind::Abstract, [&] { found.push_back(extract_abstract(record, doc, *extractor_)); });
    if (kinds.count(MaterialKind::Slides)) {
      attempt(MaterialKind::Slides, [&] {
        if (!horizontal_) throw Error(ErrorCode::ConfigError, "no horizontal engine configured");
        const auto terms = doc && doc->verified ? doc->section_terms : std::vector<std::string>{};
        found.push_back(find_slides(record, *horizontal_, *extractor_, terms, cfg_.defaults.m_sections));
      });
    }
    if (kinds.count(MaterialKind::BlogPost)) {
      attempt(MaterialKind::BlogPost, [&] {
        if (!blog_) throw Error(ErrorCode::ConfigError, "no blog engine configured");
        for (auto& m : find_blog_posts(record, *blog_)) found.push_back(std::move(m));
      });
    }

    {
      std::lock_guard lock(s->mutex);
      auto& stored = s->data.support[index];
      std::erase_if(stored, [&](const SupportMaterial& m) {
        return std::any_of(found.begin(), found.end(), [&](const auto& f) { return f.kind == m.kind; });
      });
      for (const auto& m : found) stored.push_back(m);
    }
    json materials = json::array();
    for (const auto& m : found) materials.push_back(material_to_json(m));
    return {{"task_id", task_id}, {"record_index", index}, {"materials", materials}, {"errors", errors}};
  }

  // Optional "materials": kinds of stored support to carry into the
  // subtrees; all stored material by default.
  json import(const json& req) {
    const auto task_id = req.value("task_id", "");
    const auto target = req.value("target_node_id", "");
    if (target.empty()) throw Error(ErrorCode::BadRequest, "target_node_id required");
    const auto s = session(task_id);
    std::optional<std::set<MaterialKind>> keep;
    if (req.contains("materials")) {
      keep.emplace();
      for (const auto& k : req["materials"])
        if (auto mk = material_from_name(k.get<std::string>())) keep->insert(*mk);
    }
    std::vector<MindmapNode> subtrees;
    {
      std::lock_guard lock(s->mutex);
      for (const auto& jidx : req.value("record_indices", json::array())) {
        const auto i = jidx.get<std::size_t>();
        if (i >= s->data.records.size())
          throw Error(ErrorCode::BadRequest, "record index " + std::to_string(i) + " out of range");
        std::vector<SupportMaterial> mats;
        if (auto it = s->data.support.find(i); it != s->data.support.end())
          for (const auto& m : it->second)
            if (!keep || keep->count(m.kind)) mats.push_back(m);
        std::lock_guard id_lock(ids_mutex_);
        subtrees.push_back(build_mm_subtree(s->data.records[i], mats, ids_));
      }
    }
    ImportStats stats;
    json ids = json::array();
    {
      std::unique_lock lock(map_mutex_);
      // Regenerate ids that happen to collide with the current map.
      const auto existing = collect_ids(map_.root);
      const std::set<std::string> taken(existing.begin(), existing.end());
      for (auto& st : subtrees) {
        std::lock_guard id_lock(ids_mutex_);
        for_each_node_mut(st, [&](MindmapNode& n) {
          while (taken.count(n.id)) n.id = ids_.next();
        });
      }
      auto updated = import_results(map_, target, subtrees, &stats);
      map_ = std::move(updated);
      for (const auto& st : subtrees)
        if (find_node(map_, st.id)) ids.push_back(st.id);
    }
    return {{"attached", stats.attached}, {"skipped", stats.skipped}, {"target_node_id", target}, {"subtree_ids", ids}};
  }

  json venues() const {
    json out = json::array();
    for (const auto& e : catalog_.entries()) out.push_back({{"acronym", e.acronym}, {"title", e.title}});
    return out;
  }

  json sources() const {
    json out = json::array();
    for (const auto& s : registry_.all()) out.push_back({{"name", s.name}, {"priority", s.priority}});
    json engines = json::object();
    if (cfg_.horizontal) engines["horizontal"] = cfg_.horizontal->name;
    if (cfg_.blog) engines["blog"] = cfg_.blog->name;
    return {{"sources", out}, {"engines", engines}};
  }

  const VenueCatalog& catalog() const { return catalog_; }
  const StopwordList& stopwords() const { return stopwords_; }
  const DocWeights& weights() const { return weights_; }

  static json parse_body(const std::string& body) {
    if (body.empty()) return json::object();
    try {
      return json::parse(body);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::BadRequest, std::string("invalid JSON body: ") + e.what());
    }
  }

 private:
  struct LockedSession {
    mutable std::mutex mutex;
    SearchSession data;
  };

  ServiceConfig cfg_;
  wrapper::Fetcher fetcher_;
  std::shared_ptr<TextExtractor> extractor_;
  Mindmap map_;
  mutable std::shared_mutex map_mutex_;
  VenueCatalog catalog_;
  StopwordList stopwords_;
  DocWeights weights_;
  SourceRegistry registry_;
  std::shared_ptr<SearchEngine> horizontal_;
  std::shared_ptr<SearchEngine> blog_;
  std::map<std::string, std::shared_ptr<LockedSession>> sessions_;
  mutable std::mutex sessions_mutex_;
  std::atomic<std::uint64_t> task_counter_{0};
  IdGenerator ids_;
  std::mutex ids_mutex_;

  static wrapper::Fetcher default_fetcher(const ServiceConfig& cfg) {
    if (cfg.fixtures_dir) return FixtureFetcher(*cfg.fixtures_dir).as_fetcher();
    HttpOptions o;
    o.user_agent = cfg.user_agent;
    o.timeout = std::chrono::milliseconds(static_cast<long long>(cfg.defaults.timeout_s * 1000));
    return HttpFetcher(o);
  }

  static std::shared_ptr<TextExtractor> default_extractor(const ServiceConfig& cfg) {
    if (cfg.text_dir) return std::make_shared<SidecarTextExtractor>(*cfg.text_dir);
    return std::make_shared<FetchingTextExtractor>(default_fetcher(cfg));
  }

  static Mindmap load_map(const std::string& path) {
    const auto content = read_file(path);
    if (!content) throw Error(ErrorCode::IoError, "cannot read mindmap " + path);
    auto m = parse_mindmap(*content);
    m.source_path = path;
    return m;
  }

  static wrapper::WrapperConfig load_wrapper(const std::string& path) {
    const auto content = read_file(path);
    if (!content) throw Error(ErrorCode::IoError, "cannot read wrapper config " + path);
    return wrapper::parse_config(*content);
  }

  std::shared_ptr<SearchEngine> make_engine(const EngineDecl& d) const {
    return std::make_shared<WrapperEngine>(d.name, load_wrapper(d.config_path),
                                           wrapper::ResultMapping::from(d.result_mapping), fetcher_, d.filetype_style);
  }

  static void for_each_node_mut(MindmapNode& n, const std::function<void(MindmapNode&)>& fn) {
    fn(n);
    for (auto& c : n.children) for_each_node_mut(c, fn);
  }

  static std::set<std::string> id_set(const json& req, const char* key) {
    std::set<std::string> out;
    if (req.contains(key))
      for (const auto& v : req[key]) out.insert(v.get<std::string>());
    return out;
  }

  std::pair<SemanticNeighbourhood, ExpandedQuery> expand(const Mindmap& map, const json& req) const {
    const auto level = req.value("level", cfg_.defaults.level);
    const auto k = req.value("k", cfg_.defaults.k);
    auto n = compute_neighbourhood(map, id_set(req, "selected_ids"), level);
    n = refine_neighbourhood(map, std::move(n), id_set(req, "add_ids"), id_set(req, "remove_ids"));
    auto q = expand_query(req.value("base_query", ""), map, n, weights_, stopwords_, k);
    return {std::move(n), std::move(q)};
  }

  std::shared_ptr<LockedSession> session(const std::string& task_id) const {
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(task_id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownTask, "no search task '" + task_id + "'");
    return it->second;
  }

  static json diagnostics_json(const std::vector<SourceStatus>& ds) {
    json out = json::array();
    for (const auto& d : ds)
      out.push_back({{"source", d.source}, {"status", d.status}, {"error_code", d.error_code},
                     {"message", d.message}, {"count", d.count}});
    return out;
  }
};

}  // namespace mindforge
