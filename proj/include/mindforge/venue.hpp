#pragma once

// Venue-name cleaning: a raw journal/conference string s is mapped to the
// catalog entry (a, t) minimizing L(s, a) + L(s, t), where L is the
// Levenshtein distance over code points. Ties go to the earlier entry.

#include <algorithm>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mindforge/error.hpp"
#include "mindforge/record.hpp"
#include "mindforge/text.hpp"

namespace mindforge {

inline constexpr std::size_t kMaxEditLength = 512;

namespace detail {

inline std::u32string bounded(std::string_view s) {
  auto cps = text::decode(s);
  if (cps.size() > kMaxEditLength) {
    warn("levenshtein: input of " + std::to_string(cps.size()) + " characters truncated to " +
         std::to_string(kMaxEditLength));
    cps.resize(kMaxEditLength);
  }
  return cps;
}

}  // namespace detail

// Unit-cost insert/delete/substitute distance, two-row DP.
inline std::size_t levenshtein(std::string_view s1, std::string_view s2) {
  auto a = detail::bounded(s1);
  auto b = detail::bounded(s2);
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

class VenueCatalog {
 public:
  VenueCatalog() = default;

  explicit VenueCatalog(std::vector<VenueEntry> entries) {
    for (auto& e : entries) add(std::move(e));
  }

  // acronym<TAB>title per line; blank lines and '#' comments skipped.
  static VenueCatalog parse_tsv(std::string_view content) {
    VenueCatalog c;
    std::size_t line_no = 0;
    for (auto line : text::split_lines(content)) {
      ++line_no;
      if (text::trim(line).empty() || line.front() == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string_view::npos)
        throw Error(ErrorCode::MalformedCatalog, "line " + std::to_string(line_no) + ": expected acronym<TAB>title");
      c.add({std::string(text::trim(line.substr(0, tab))), std::string(text::trim(line.substr(tab + 1)))});
    }
    return c;
  }

  static VenueCatalog load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read venue catalog " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_tsv(ss.str());
  }

  void add(VenueEntry e) {
    if (e.acronym.empty()) throw Error(ErrorCode::MalformedCatalog, "empty acronym for '" + e.title + "'");
    if (std::find(entries_.begin(), entries_.end(), e) != entries_.end())
      throw Error(ErrorCode::MalformedCatalog, "duplicate entry " + e.acronym + " / " + e.title);
    entries_.push_back(std::move(e));
  }

  const std::vector<VenueEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<VenueEntry> entries_;
};

struct VenueMatch {
  VenueEntry entry;
  std::size_t distance = 0;  // L(s,a) + L(s,t)
  std::size_t index = 0;     // catalog position
};

struct MatchOptions {
  // Reject matches whose summed distance exceeds this. Disabled by default.
  std::optional<std::size_t> max_distance;
};

inline VenueMatch match_venue_scored(std::string_view s, const VenueCatalog& catalog) {
  if (catalog.empty()) throw Error(ErrorCode::EmptyCatalog, "venue catalog is empty");
  VenueMatch best{catalog.entries().front(), std::numeric_limits<std::size_t>::max(), 0};
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto& e = catalog.entries()[i];
    const auto d = levenshtein(s, e.acronym) + levenshtein(s, e.title);
    if (d < best.distance) best = {e, d, i};
  }
  return best;
}

inline VenueEntry match_venue(std::string_view s, const VenueCatalog& catalog) {
  return match_venue_scored(s, catalog).entry;
}

inline std::vector<PublicationRecord> normalize_records(std::vector<PublicationRecord> records,
                                                        const VenueCatalog& catalog,
                                                        const MatchOptions& options = {}) {
  if (catalog.empty()) throw Error(ErrorCode::EmptyCatalog, "venue catalog is empty");
  for (auto& r : records) {
    r.venue_norm.reset();
    if (text::trim(r.venue_raw).empty()) continue;
    auto m = match_venue_scored(r.venue_raw, catalog);
    if (options.max_distance && m.distance > *options.max_distance) continue;
    r.venue_norm = std::move(m.entry);
  }
  return records;
}

}  // namespace mindforge
