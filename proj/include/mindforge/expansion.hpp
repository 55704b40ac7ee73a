#pragma once

// Semantic query expansion. The selected mindmap elements and their
// neighbourhood become small documents; every term t in document d gets
//
//   w(t,d) = freq(t,d) * docFreq(t) * docWeight(d) / docSize(d)
//
// and its aggregate W(t) is the mean of w(t,d) over the documents that
// contain t. The top-K terms by W(t) extend the user's query.

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mindforge/error.hpp"
#include "mindforge/mindmap.hpp"
#include "mindforge/text.hpp"

namespace mindforge {

class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(std::set<std::string> words) : words_(std::move(words)) {}

  // One term per line; '#' starts a comment line. Entries are normalized
  // with the same tokenizer as document text ("don't" -> "dont").
  static StopwordList parse(std::string_view content) {
    std::set<std::string> words;
    for (auto line : text::split_lines(content)) {
      line = text::trim(line);
      if (line.empty() || line.front() == '#') continue;
      for (auto& t : text::tokenize(line)) words.insert(std::move(t));
    }
    return StopwordList(std::move(words));
  }

  static StopwordList load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read stopword list " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  bool contains(std::string_view term) const { return words_.find(std::string(term)) != words_.end(); }
  std::size_t size() const { return words_.size(); }

 private:
  std::set<std::string> words_;
};

// docWeight per element kind; topics outweigh details.
class DocWeights {
 public:
  DocWeights() {
    set(ElementKind::Topic, 2.0);
    set(ElementKind::LargerTopic, 2.0);
    set(ElementKind::KeywordsObject, 1.75);
    set(ElementKind::Question, 1.5);
    set(ElementKind::Hot, 1.5);
    set(ElementKind::NeedsAction, 1.5);
    set(ElementKind::WaitingTopic, 1.5);
    set(ElementKind::Detail, 1.0);
    set(ElementKind::Link, 1.0);
    set(ElementKind::CodeObject, 1.0);
    set(ElementKind::Cloud, 1.0);
  }

  void set(ElementKind kind, double weight) {
    if (!(weight > 0.0) || !std::isfinite(weight))
      throw Error(ErrorCode::ConfigError,
                  "docWeight for " + std::string(kind_name(kind)) + " must be a positive number");
    weights_[static_cast<std::size_t>(kind)] = weight;
  }

  double operator[](ElementKind kind) const { return weights_[static_cast<std::size_t>(kind)]; }

 private:
  std::array<double, kAllKinds.size()> weights_{};
};

struct SemanticNeighbourhood {
  std::set<std::string> selected_ids;
  unsigned level = 1;
  std::set<std::string> included_ids;
};

struct ExpansionDocument {
  std::string doc_id;
  std::vector<std::string> terms;
  double doc_weight = 1.0;

  std::size_t doc_size() const { return terms.size(); }
};

struct TermScore {
  std::string term;
  std::map<std::string, double> per_doc;           // doc id -> w(t,d)
  std::map<std::string, std::size_t> freq_by_doc;  // doc id -> freq(t,d)
  std::size_t doc_freq = 0;
  double aggregate = 0.0;  // W(t)
};

struct ExpandedQuery {
  std::vector<std::string> base_terms;
  std::vector<TermScore> expansion_terms;
  std::size_t k = 0;

  std::vector<std::string> terms() const {
    std::vector<std::string> out = base_terms;
    for (const auto& t : expansion_terms) out.push_back(t.term);
    return out;
  }

  std::string query_string() const {
    std::string out;
    for (const auto& t : terms()) {
      if (!out.empty()) out += ' ';
      out += t;
    }
    return out;
  }
};

// All nodes within undirected tree distance <= level of any selected node.
inline SemanticNeighbourhood compute_neighbourhood(const Mindmap& map,
                                                   const std::set<std::string>& selected_ids,
                                                   unsigned level) {
  if (selected_ids.empty()) throw Error(ErrorCode::EmptySelection, "no mindmap element selected");
  if (level == 0) throw Error(ErrorCode::ZeroLevel, "neighbourhood level must be >= 1");

  std::map<std::string, std::vector<std::string>> adjacency;
  for_each_node(map.root, [&](const MindmapNode& n, int) {
    auto& self = adjacency[n.id];
    for (const auto& c : n.children) {
      self.push_back(c.id);
      adjacency[c.id].push_back(n.id);
    }
  });
  for (const auto& id : selected_ids)
    if (!adjacency.count(id)) throw Error(ErrorCode::UnknownNode, "no node with id '" + id + "'");

  SemanticNeighbourhood n{selected_ids, level, {}};
  std::map<std::string, unsigned> dist;
  std::deque<std::string> queue;
  for (const auto& id : selected_ids) {
    dist[id] = 0;
    queue.push_back(id);
  }
  while (!queue.empty()) {
    const auto id = queue.front();
    queue.pop_front();
    n.included_ids.insert(id);
    if (dist[id] == level) continue;
    for (const auto& next : adjacency[id]) {
      if (dist.count(next)) continue;
      dist[next] = dist[id] + 1;
      queue.push_back(next);
    }
  }
  return n;
}

// included' = (included + add) - remove. User choices override distance.
inline SemanticNeighbourhood refine_neighbourhood(const Mindmap& map, SemanticNeighbourhood n,
                                                  const std::set<std::string>& add,
                                                  const std::set<std::string>& remove) {
  for (const auto* ids : {&add, &remove})
    for (const auto& id : *ids)
      if (!find_node(map, id)) throw Error(ErrorCode::UnknownNode, "no node with id '" + id + "'");
  for (const auto& id : add) n.included_ids.insert(id);
  for (const auto& id : remove) n.included_ids.erase(id);
  return n;
}

inline std::vector<std::string> clean_terms(std::string_view s, const StopwordList& stopwords) {
  std::vector<std::string> out;
  for (auto& t : text::tokenize(s))
    if (!stopwords.contains(t)) out.push_back(std::move(t));
  return out;
}

// One document per included node, in map preorder. Text and detail note
// are cleaned; nodes left with no terms are dropped.
inline std::vector<ExpansionDocument> build_documents(const Mindmap& map, const SemanticNeighbourhood& n,
                                                      const DocWeights& weights,
                                                      const StopwordList& stopwords) {
  std::vector<ExpansionDocument> docs;
  for_each_node(map.root, [&](const MindmapNode& node, int) {
    if (!n.included_ids.count(node.id)) return;
    std::string content = node.text;
    if (node.detail_note) content += "\n" + *node.detail_note;
    auto terms = clean_terms(content, stopwords);
    if (terms.empty()) return;
    docs.push_back({node.id, std::move(terms), weights[node.kind]});
  });
  return docs;
}

// Sorted by W(t) descending, ties broken by term.
inline std::vector<TermScore> score_terms(const std::vector<ExpansionDocument>& docs) {
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "no documents to score");
  std::map<std::string, TermScore> by_term;
  std::set<std::string> doc_ids;
  for (const auto& d : docs) {
    if (d.terms.empty()) throw Error(ErrorCode::InvalidDocument, "document '" + d.doc_id + "' has no terms");
    if (!(d.doc_weight > 0.0)) throw Error(ErrorCode::InvalidDocument, "document '" + d.doc_id + "' weight <= 0");
    if (!doc_ids.insert(d.doc_id).second)
      throw Error(ErrorCode::InvalidDocument, "document id '" + d.doc_id + "' repeated");
    for (const auto& t : d.terms) {
      auto& score = by_term[t];
      score.term = t;
      ++score.freq_by_doc[d.doc_id];
    }
  }
  std::map<std::string, const ExpansionDocument*> doc_index;
  for (const auto& d : docs) doc_index[d.doc_id] = &d;

  std::vector<TermScore> out;
  out.reserve(by_term.size());
  for (auto& [term, score] : by_term) {
    score.doc_freq = score.freq_by_doc.size();
    double sum = 0.0;
    for (const auto& [doc_id, freq] : score.freq_by_doc) {
      const auto& d = *doc_index.at(doc_id);
      const double w = static_cast<double>(freq) * static_cast<double>(score.doc_freq) * d.doc_weight /
                       static_cast<double>(d.doc_size());
      score.per_doc[doc_id] = w;
      sum += w;
    }
    score.aggregate = sum / static_cast<double>(score.doc_freq);
    out.push_back(std::move(score));
  }
  // Equal scores reached through different sums can differ in the last
  // bits; treat those as ties so the term order decides.
  std::sort(out.begin(), out.end(), [](const TermScore& a, const TermScore& b) {
    const double tol = 1e-12 * std::max(a.aggregate, b.aggregate);
    if (std::abs(a.aggregate - b.aggregate) > tol) return a.aggregate > b.aggregate;
    return a.term < b.term;
  });
  return out;
}

// Base terms are the user's words, tokenized and lowercased but with
// stopwords kept. Expansion terms never repeat a base term.
inline ExpandedQuery expand_query(std::string_view base, const Mindmap& map, const SemanticNeighbourhood& n,
                                  const DocWeights& weights, const StopwordList& stopwords, std::size_t k) {
  ExpandedQuery q;
  q.base_terms = text::tokenize(base);
  q.k = k;
  if (k == 0) return q;
  const auto docs = build_documents(map, n, weights, stopwords);
  if (docs.empty()) return q;
  std::unordered_set<std::string> base_set;
  for (const auto& t : q.base_terms) base_set.insert(text::casefold(t));
  for (auto& s : score_terms(docs)) {
    if (q.expansion_terms.size() >= k) break;
    if (base_set.count(text::casefold(s.term))) continue;
    q.expansion_terms.push_back(std::move(s));
  }
  return q;
}

}  // namespace mindforge
