#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mindforge {

struct VenueEntry {
  std::string acronym;
  std::string title;

  friend bool operator==(const VenueEntry&, const VenueEntry&) = default;
};

// A normalized search hit. source_rank is the 1-based position in the
// originating source's result list.
struct PublicationRecord {
  std::string title;
  std::vector<std::string> authors;
  std::string venue_raw;
  std::optional<VenueEntry> venue_norm;
  std::optional<int> date;  // publication year
  std::optional<std::string> url;
  std::optional<std::string> abstract;
  std::string source_id;
  std::size_t source_rank = 0;

  friend bool operator==(const PublicationRecord&, const PublicationRecord&) = default;
};

inline constexpr int kMinYear = 1900;
inline constexpr int kMaxYear = 2100;

inline bool valid_year(int y) { return y >= kMinYear && y <= kMaxYear; }

}  // namespace mindforge
