#pragma once

// Cross-source duplicate elimination with date-keyed blocking. Each
// source's result list is partitioned by publication year; a record is only
// compared with records from other sources that carry the same key.
// Duplicates are exact matches on canonical title and normalized venue.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mindforge/record.hpp"
#include "mindforge/text.hpp"

namespace mindforge {

// Publication year, or the UNKNOWN sentinel for dateless records.
struct DateKey {
  std::optional<int> year;

  static DateKey of(const PublicationRecord& r) { return {r.date}; }
  bool unknown() const { return !year.has_value(); }
  std::string label() const { return year ? std::to_string(*year) : "UNKNOWN"; }

  // UNKNOWN sorts last
  friend bool operator<(const DateKey& a, const DateKey& b) {
    if (a.year.has_value() != b.year.has_value()) return a.year.has_value();
    return a.year < b.year;
  }
  friend bool operator==(const DateKey&, const DateKey&) = default;
};

struct Block {
  DateKey key;
  std::vector<PublicationRecord> records;
};

using SourceResults = std::pair<std::string, std::vector<PublicationRecord>>;

inline std::map<DateKey, Block> partition_by_date(const std::vector<PublicationRecord>& records) {
  std::map<DateKey, Block> blocks;
  for (const auto& r : records) {
    const auto key = DateKey::of(r);
    auto& block = blocks[key];
    block.key = key;
    block.records.push_back(r);
  }
  return blocks;
}

inline std::string canonical_venue(const PublicationRecord& r) {
  return r.venue_norm ? r.venue_norm->acronym : text::canonical(r.venue_raw);
}

// The equality predicate shared by the blocking path and any oracle.
inline bool same_publication(const PublicationRecord& a, const PublicationRecord& b) {
  return a.date == b.date && text::canonical(a.title) == text::canonical(b.title) &&
         canonical_venue(a) == canonical_venue(b);
}

struct DedupStats {
  std::size_t comparisons = 0;
  std::map<std::string, std::size_t> comparisons_by_key;
  std::size_t removed = 0;
};

// `per_source` is in priority order (first = highest). Survivors are the
// first occurrence in (source priority, source_rank) order, which is also
// the output order. Records within one source are never compared with each
// other.
inline std::vector<PublicationRecord> deduplicate(const std::vector<SourceResults>& per_source,
                                                  DedupStats* stats = nullptr) {
  struct Kept {
    std::string title;
    std::string venue;
  };
  std::map<DateKey, std::vector<Kept>> kept_by_key;
  std::vector<PublicationRecord> out;
  DedupStats local;

  for (const auto& [source_id, records] : per_source) {
    auto ordered = records;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) { return a.source_rank < b.source_rank; });

    // Blocks hold indices into `ordered` so survivors can be emitted in rank order.
    std::map<DateKey, std::vector<std::size_t>> blocks;
    for (std::size_t i = 0; i < ordered.size(); ++i) blocks[DateKey::of(ordered[i])].push_back(i);

    std::vector<bool> survives(ordered.size(), true);
    std::vector<std::pair<DateKey, Kept>> accepted;
    for (const auto& [key, indices] : blocks) {
      const auto pool_it = kept_by_key.find(key);
      for (const auto i : indices) {
        Kept candidate{text::canonical(ordered[i].title), canonical_venue(ordered[i])};
        if (pool_it != kept_by_key.end()) {
          for (const auto& k : pool_it->second) {
            ++local.comparisons;
            ++local.comparisons_by_key[key.label()];
            if (k.title == candidate.title && k.venue == candidate.venue) {
              survives[i] = false;
              break;
            }
          }
        }
        if (survives[i])
          accepted.emplace_back(key, std::move(candidate));
        else
          ++local.removed;
      }
    }
    // Survivors become visible to lower-priority sources only.
    for (auto& [key, k] : accepted) kept_by_key[key].push_back(std::move(k));
    for (std::size_t i = 0; i < ordered.size(); ++i)
      if (survives[i]) out.push_back(std::move(ordered[i]));
  }
  if (stats) *stats = std::move(local);
  return out;
}

}  // namespace mindforge
