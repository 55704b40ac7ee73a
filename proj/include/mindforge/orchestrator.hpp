#pragma once

// Search orchestration: vertical search fans a query out to every wrapped
// publication source, then cleans and deduplicates the merged list.
// Horizontal search looks up supporting material (document, abstract,
// slides, blog posts) for a single record through general engines.

#include <algorithm>
#include <chrono>
#include <exception>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mindforge/dedup.hpp"
#include "mindforge/error.hpp"
#include "mindforge/expansion.hpp"
#include "mindforge/record.hpp"
#include "mindforge/text.hpp"
#include "mindforge/venue.hpp"
#include "mindforge/wrapper.hpp"

namespace mindforge {

// ---------------------------------------------------------------------------
// Adapter contracts

class SourceAdapter {
 public:
  virtual ~SourceAdapter() = default;
  virtual std::string name() const = 0;
  // Returns at most `limit` records ranked 1..n. Throws on failure.
  virtual std::vector<PublicationRecord> search(const std::string& query, std::size_t limit) = 0;
};

struct EngineQuery {
  std::string text;
  std::optional<std::string> filetype;  // "pdf", "doc", "ppt", ...
};

struct EngineHit {
  std::string title;
  std::string url;
  std::string snippet;
};

class SearchEngine {
 public:
  virtual ~SearchEngine() = default;
  virtual std::string name() const = 0;
  virtual std::vector<EngineHit> search(const EngineQuery& query) = 0;
};

struct ExtractedText {
  std::string text;
  bool ok = false;
};

// Total: failures return empty text with ok == false.
class TextExtractor {
 public:
  virtual ~TextExtractor() = default;
  virtual ExtractedText extract(const std::string& url) = 0;
};

// ---------------------------------------------------------------------------
// Wrapper-backed adapters

class WrapperSource : public SourceAdapter {
 public:
  WrapperSource(std::string name, wrapper::WrapperConfig config, wrapper::ResultMapping mapping,
                wrapper::Fetcher fetcher, std::string query_variable = "searchQuery")
      : name_(std::move(name)),
        config_(std::move(config)),
        mapping_(std::move(mapping)),
        fetcher_(std::move(fetcher)),
        query_variable_(std::move(query_variable)) {
    mapping_.validate_against(config_);
  }

  std::string name() const override { return name_; }

  std::vector<PublicationRecord> search(const std::string& query, std::size_t limit) override {
    const auto ctx = wrapper::execute(config_, {{query_variable_, query}, {"limit", std::to_string(limit)}}, fetcher_);
    auto records = wrapper::records_from(ctx, mapping_, name_);
    if (records.size() > limit) records.resize(limit);
    return records;
  }

 private:
  std::string name_;
  wrapper::WrapperConfig config_;
  wrapper::ResultMapping mapping_;
  wrapper::Fetcher fetcher_;
  std::string query_variable_;
};

// How an engine wants file-type restrictions expressed.
enum class FiletypeStyle {
  Operator,  // appended to the query text as "filetype:pdf"
  Variable,  // bound to the wrapper variable "fileType"
};

class WrapperEngine : public SearchEngine {
 public:
  WrapperEngine(std::string name, wrapper::WrapperConfig config, wrapper::ResultMapping mapping,
                wrapper::Fetcher fetcher, FiletypeStyle style = FiletypeStyle::Operator,
                std::string query_variable = "searchQuery")
      : name_(std::move(name)),
        config_(std::move(config)),
        mapping_(std::move(mapping)),
        fetcher_(std::move(fetcher)),
        style_(style),
        query_variable_(std::move(query_variable)) {
    mapping_.validate_against(config_);
  }

  std::string name() const override { return name_; }

  std::vector<EngineHit> search(const EngineQuery& q) override {
    std::map<std::string, std::string> params;
    std::string text = q.text;
    if (q.filetype) {
      if (style_ == FiletypeStyle::Operator)
        text += " filetype:" + *q.filetype;
      else
        params["fileType"] = *q.filetype;
    }
    params[query_variable_] = text;
    const auto ctx = wrapper::execute(config_, params, fetcher_);
    const auto titles = mapping_.column(ctx, "title");
    const auto urls = mapping_.column(ctx, "url");
    auto snippets = mapping_.column(ctx, "snippet");
    if (snippets.empty()) snippets = mapping_.column(ctx, "abstract");
    std::vector<EngineHit> hits;
    for (std::size_t i = 0; i < titles.size(); ++i) {
      EngineHit h{titles[i], i < urls.size() ? urls[i] : "", i < snippets.size() ? snippets[i] : ""};
      if (h.url.empty() && h.title.empty()) continue;
      hits.push_back(std::move(h));
    }
    return hits;
  }

 private:
  std::string name_;
  wrapper::WrapperConfig config_;
  wrapper::ResultMapping mapping_;
  wrapper::Fetcher fetcher_;
  FiletypeStyle style_;
  std::string query_variable_;
};

// ---------------------------------------------------------------------------
// Vertical search

struct RegisteredSource {
  std::string name;
  int priority = 0;  // lower runs first in merge order
  std::shared_ptr<SourceAdapter> adapter;
};

class SourceRegistry {
 public:
  void add(RegisteredSource s) {
    for (const auto& e : sources_)
      if (e.name == s.name || e.priority == s.priority)
        throw Error(ErrorCode::ConfigError, "source '" + s.name + "' repeats a name or priority");
    sources_.push_back(std::move(s));
    std::stable_sort(sources_.begin(), sources_.end(),
                     [](const auto& a, const auto& b) { return a.priority < b.priority; });
  }

  const RegisteredSource* find(std::string_view name) const {
    for (const auto& s : sources_)
      if (s.name == name) return &s;
    return nullptr;
  }

  const std::vector<RegisteredSource>& all() const { return sources_; }

 private:
  std::vector<RegisteredSource> sources_;
};

struct SearchTask {
  std::string task_id;
  ExpandedQuery query;
  std::vector<std::string> sources;
  std::size_t limit = 10;
};

struct SourceStatus {
  std::string source;
  std::string status;  // "ok", "failed", "timeout"
  std::string error_code;
  std::string message;
  std::size_t count = 0;
};

struct SearchOutcome {
  std::vector<PublicationRecord> records;
  std::vector<SourceStatus> diagnostics;
  DedupStats dedup;
};

struct VerticalOptions {
  std::chrono::milliseconds timeout{10000};
  MatchOptions venue;
};

// Sources run concurrently; the merge depends only on source priority and
// rank, never on completion order. A failing source contributes nothing.
inline SearchOutcome vertical_search(const SearchTask& task, const SourceRegistry& registry,
                                     const VenueCatalog& catalog, const VerticalOptions& options = {}) {
  if (task.sources.empty()) throw Error(ErrorCode::PreconditionFailed, "search task names no sources");
  if (task.limit < 1) throw Error(ErrorCode::PreconditionFailed, "limit must be >= 1");
  std::vector<const RegisteredSource*> chosen;
  for (const auto& name : task.sources) {
    const auto* s = registry.find(name);
    if (!s) throw Error(ErrorCode::UnknownSource, "no source named '" + name + "'");
    if (std::find(chosen.begin(), chosen.end(), s) == chosen.end()) chosen.push_back(s);
  }
  std::stable_sort(chosen.begin(), chosen.end(), [](auto* a, auto* b) { return a->priority < b->priority; });

  using Result = std::vector<PublicationRecord>;
  const std::string query = task.query.query_string();
  std::vector<std::future<Result>> futures;
  for (const auto* s : chosen) {
    // Detached worker so a hung source cannot block past its timeout.
    auto promise = std::make_shared<std::promise<Result>>();
    futures.push_back(promise->get_future());
    std::thread([promise, adapter = s->adapter, query, limit = task.limit] {
      try {
        promise->set_value(adapter->search(query, limit));
      } catch (...) {
        promise->set_exception(std::current_exception());
      }
    }).detach();
  }

  SearchOutcome out;
  std::vector<SourceResults> per_source;
  const auto deadline = std::chrono::steady_clock::now() + options.timeout;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    SourceStatus st{chosen[i]->name, "ok", "", "", 0};
    if (futures[i].wait_until(deadline) != std::future_status::ready) {
      st.status = "timeout";
      st.error_code = "Timeout";
      st.message = "no response within " + std::to_string(options.timeout.count()) + " ms";
      out.diagnostics.push_back(std::move(st));
      continue;
    }
    try {
      auto records = futures[i].get();
      if (records.size() > task.limit) records.resize(task.limit);
      for (std::size_t r = 0; r < records.size(); ++r) {
        records[r].source_id = chosen[i]->name;
        if (records[r].source_rank == 0) records[r].source_rank = r + 1;
      }
      st.count = records.size();
      per_source.emplace_back(chosen[i]->name, std::move(records));
    } catch (const Error& e) {
      st.status = "failed";
      st.error_code = std::string(e.name());
      st.message = e.detail();
    } catch (const std::exception& e) {
      st.status = "failed";
      st.error_code = "Internal";
      st.message = e.what();
    }
    out.diagnostics.push_back(std::move(st));
  }
  if (per_source.empty()) {
    std::string detail;
    for (const auto& d : out.diagnostics) detail += " " + d.source + "=" + d.error_code;
    throw Error(ErrorCode::AllSourcesFailed, "every source failed:" + detail);
  }
  if (!catalog.empty())
    for (auto& [name, records] : per_source) records = normalize_records(std::move(records), catalog, options.venue);
  out.records = deduplicate(per_source, &out.dedup);
  return out;
}

// ---------------------------------------------------------------------------
// Horizontal search

enum class MaterialKind { Document, Abstract, Slides, BlogPost };

constexpr std::string_view material_name(MaterialKind k) {
  switch (k) {
    case MaterialKind::Document: return "Document";
    case MaterialKind::Abstract: return "Abstract";
    case MaterialKind::Slides: return "Slides";
    case MaterialKind::BlogPost: return "BlogPost";
  }
  return "Document";
}

inline std::optional<MaterialKind> material_from_name(std::string_view s) {
  const auto n = text::casefold(s);
  if (n == "document") return MaterialKind::Document;
  if (n == "abstract") return MaterialKind::Abstract;
  if (n == "slides") return MaterialKind::Slides;
  if (n == "blogpost" || n == "blog") return MaterialKind::BlogPost;
  return std::nullopt;
}

struct SupportMaterial {
  MaterialKind kind = MaterialKind::Document;
  std::optional<std::string> url;
  std::optional<std::string> text;  // abstract body, or hit title for others
  bool verified = false;
  std::string evidence;
  std::vector<std::string> section_terms;  // headings, documents only
};

namespace detail {

inline std::string quoted(std::string_view title) { return "\"" + std::string(title) + "\""; }

inline bool numbered_heading(std::string_view line, std::string* title = nullptr) {
  static const std::regex re(R"(^\s*(\d+(\.\d+)*)\.?\s+([A-Z][A-Za-z][^.]{0,70})\s*$)");
  std::cmatch m;
  const std::string s(line);
  if (!std::regex_match(s.c_str(), m, re)) return false;
  if (title) *title = std::string(text::trim(m[3].str()));
  return true;
}

inline bool named_heading(std::string_view line) {
  static const std::vector<std::string> names = {"introduction", "keywords", "index terms", "background",
                                                 "related work", "references", "categories and subject descriptors",
                                                 "general terms", "1 introduction"};
  auto c = text::casefold(text::trim(line));
  while (!c.empty() && (c.back() == ':' || c.back() == '.')) c.pop_back();
  return std::find(names.begin(), names.end(), c) != names.end();
}

}  // namespace detail

// Numbered section headings ("2 Related Work", "3.1 Scoring") of a document.
inline std::vector<std::string> section_headings(std::string_view document_text) {
  std::vector<std::string> out;
  for (auto line : text::split_lines(document_text)) {
    std::string title;
    if (detail::numbered_heading(line, &title)) out.push_back(title);
  }
  return out;
}

// Quoted title restricted to pdf, then doc. The first candidate whose
// extracted text contains the canonical title wins.
inline SupportMaterial find_document(const PublicationRecord& record, SearchEngine& engine, TextExtractor& extractor) {
  if (text::trim(record.title).empty()) throw Error(ErrorCode::PreconditionFailed, "record has no title");
  const auto want = text::canonical(record.title);
  std::optional<EngineHit> top;
  std::size_t examined = 0;
  for (const char* ft : {"pdf", "doc"}) {
    for (const auto& hit : engine.search({detail::quoted(record.title), std::string(ft)})) {
      if (!top) top = hit;
      ++examined;
      const auto doc = extractor.extract(hit.url);
      if (doc.ok && text::canonical(doc.text).find(want) != std::string::npos) {
        return {MaterialKind::Document, hit.url, hit.title, true, "title-substring", section_headings(doc.text)};
      }
    }
  }
  if (!top) throw Error(ErrorCode::NoCandidates, "no pdf/doc hits for " + detail::quoted(record.title));
  return {MaterialKind::Document, top->url, top->title, false,
          "title-not-found in " + std::to_string(examined) + " candidate(s)", {}};
}

// Metadata abstract when the source provides one (verified); otherwise the
// paragraph between an "Abstract" line and the next heading of the document.
inline SupportMaterial extract_abstract(const PublicationRecord& record, const std::optional<SupportMaterial>& doc,
                                        TextExtractor& extractor) {
  if (record.abstract && !text::trim(*record.abstract).empty())
    return {MaterialKind::Abstract, record.url, *record.abstract, true, "source-metadata", {}};
  if (doc && doc->url) {
    const auto extracted = extractor.extract(*doc->url);
    if (extracted.ok) {
      const auto lines = text::split_lines(extracted.text);
      for (std::size_t i = 0; i < lines.size(); ++i) {
        auto l = text::casefold(text::trim(lines[i]));
        if (l != "abstract") continue;
        std::string body;
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
          if (detail::numbered_heading(lines[j]) || detail::named_heading(lines[j])) break;
          const auto t = text::trim(lines[j]);
          if (t.empty()) {
            if (!body.empty() && j + 1 < lines.size() && text::trim(lines[j + 1]).empty()) break;
            continue;
          }
          if (!body.empty()) body += ' ';
          body += t;
        }
        if (!body.empty())
          return {MaterialKind::Abstract, doc->url, text::collapse_whitespace(body), false, "document-abstract-heading", {}};
      }
    }
  }
  throw Error(ErrorCode::AbstractNotFound, "no abstract for '" + record.title + "'");
}

// Quoted title restricted to ppt, then pdf. A deck verifies when it says
// "outline" or mentions at least `min_sections` of the document headings.
inline SupportMaterial find_slides(const PublicationRecord& record, SearchEngine& engine, TextExtractor& extractor,
                                   const std::vector<std::string>& section_terms, std::size_t min_sections = 2) {
  std::optional<SupportMaterial> top;
  for (const char* ft : {"ppt", "pdf"}) {
    for (const auto& hit : engine.search({detail::quoted(record.title), std::string(ft)})) {
      const auto deck = extractor.extract(hit.url);
      const auto canon = text::canonical(deck.text);
      std::size_t hits = 0;
      for (const auto& term : section_terms) {
        const auto c = text::canonical(term);
        if (!c.empty() && canon.find(c) != std::string::npos) ++hits;
      }
      const bool outline = text::casefold(deck.text).find("outline") != std::string::npos;
      const std::string sections = "sections:" + std::to_string(hits) + "/" + std::to_string(section_terms.size());
      const bool by_sections = !section_terms.empty() && hits >= min_sections;
      SupportMaterial m{MaterialKind::Slides, hit.url, hit.title, outline || by_sections, "", {}};
      if (outline)
        m.evidence = "outline";
      else if (by_sections)
        m.evidence = sections + " (m=" + std::to_string(min_sections) + ")";
      else
        m.evidence = std::string(deck.ok ? "" : "extraction-failed; ") + "no-outline; " + sections +
                     " (m=" + std::to_string(min_sections) + ")";
      if (m.verified) return m;
      if (!top) top = std::move(m);
    }
  }
  if (!top) throw Error(ErrorCode::NoCandidates, "no ppt/pdf hits for " + detail::quoted(record.title));
  return *top;
}

// Family name = last whitespace-separated token of the first author.
inline std::string first_author_family_name(const PublicationRecord& record) {
  if (record.authors.empty()) throw Error(ErrorCode::PreconditionFailed, "record has no authors");
  const auto name = text::collapse_whitespace(record.authors.front());
  const auto sp = name.rfind(' ');
  return sp == std::string::npos ? name : name.substr(sp + 1);
}

inline std::vector<SupportMaterial> find_blog_posts(const PublicationRecord& record, SearchEngine& blog_engine) {
  const auto query = record.title + " " + first_author_family_name(record);
  const auto hits = blog_engine.search({query, std::nullopt});
  if (hits.empty()) throw Error(ErrorCode::NoCandidates, "no blog posts for '" + query + "'");
  std::vector<SupportMaterial> out;
  for (const auto& h : hits)
    out.push_back({MaterialKind::BlogPost, h.url, h.title, false, "unverified: engine result for '" + query + "'", {}});
  return out;
}

}  // namespace mindforge
