#include <gtest/gtest.h>

#include <random>

#include "mindforge/dedup.hpp"
#include "oracles.hpp"

using namespace mindforge;

namespace {

PublicationRecord rec(const std::string& title, int year, std::size_t rank, const std::string& venue = "VLDB") {
  PublicationRecord r;
  r.title = title;
  r.date = year;
  r.source_rank = rank;
  r.venue_raw = venue;
  r.venue_norm = VenueEntry{venue, venue + " title"};
  return r;
}

std::vector<std::string> titles(const std::vector<PublicationRecord>& rs) {
  std::vector<std::string> out;
  for (const auto& r : rs) out.push_back(r.title);
  return out;
}

}  // namespace

TEST(PartitionByDate, TwoYearBlocks) {
  std::vector<PublicationRecord> s1 = {rec("o1", 2004, 1), rec("o3", 2004, 2), rec("o5", 2004, 3),
                                       rec("o6", 2004, 4), rec("o2", 2005, 5), rec("o4", 2005, 6)};
  const auto blocks = partition_by_date(s1);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(titles(blocks.at(DateKey{2004}).records), (std::vector<std::string>{"o1", "o3", "o5", "o6"}));
  EXPECT_EQ(titles(blocks.at(DateKey{2005}).records), (std::vector<std::string>{"o2", "o4"}));
}

TEST(Deduplicate, WorkedInstance) {
  const std::vector<PublicationRecord> s1 = {rec("o1", 2004, 1), rec("o2", 2005, 2), rec("o3", 2004, 3),
                                             rec("o4", 2005, 4), rec("o5", 2004, 5), rec("o6", 2004, 6)};
  const std::vector<PublicationRecord> s2 = {rec("o1", 2004, 1), rec("o5", 2004, 2), rec("o8", 2004, 3)};
  DedupStats st;
  const auto out = deduplicate({{"s1", s1}, {"s2", s2}}, &st);
  EXPECT_EQ(titles(out), (std::vector<std::string>{"o1", "o2", "o3", "o4", "o5", "o6", "o8"}));
  EXPECT_EQ(st.removed, 2u);
  EXPECT_LE(st.comparisons_by_key["2004"], 4u * 3u);
  EXPECT_EQ(st.comparisons_by_key.count("2005"), 0u);  // H2 has no partner block
  EXPECT_EQ(st.comparisons, st.comparisons_by_key["2004"]);
}

TEST(Deduplicate, WithinSourceDuplicatesKept) {
  const auto out = deduplicate({{"s1", {rec("same", 2001, 1), rec("same", 2001, 2)}}});
  EXPECT_EQ(out.size(), 2u);
}

TEST(Deduplicate, CanonicalTitleAndVenueMustMatch) {
  const auto out = deduplicate({{"a", {rec("Mining Graphs.", 2001, 1)}},
                                {"b", {rec("  mining   GRAPHS", 2001, 1), rec("Mining graphs", 2001, 2, "KDD"),
                                       rec("Mining graphs", 2002, 3)}}});
  EXPECT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].title, "Mining Graphs.");
  EXPECT_EQ(out[1].venue_norm->acronym, "KDD");
  EXPECT_EQ(*out[2].date, 2002);
}

TEST(Deduplicate, UnknownDatesFormTheirOwnBlock) {
  auto a = rec("x", 0, 1), b = rec("x", 0, 1);
  a.date.reset();
  b.date.reset();
  DedupStats st;
  const auto out = deduplicate({{"a", {a}}, {"b", {b}}}, &st);
  EXPECT_EQ(out.size(), 1u);
  EXPECT_EQ(st.comparisons_by_key["UNKNOWN"], 1u);
}

TEST(Deduplicate, OutputOrderIsPriorityThenRank) {
  const auto out = deduplicate({{"a", {rec("a2", 2000, 2), rec("a1", 2001, 1)}}, {"b", {rec("b1", 1999, 1)}}});
  EXPECT_EQ(titles(out), (std::vector<std::string>{"a1", "a2", "b1"}));
}

TEST(Deduplicate, MatchesAllPairsOracle) {
  std::mt19937 rng(2010);
  const std::vector<std::string> words = {"mining", "graphs", "fast", "neural", "bayes", "micro", "rna", "index"};
  const std::vector<std::string> venues = {"VLDB", "KDD", "NAR"};
  for (int trial = 0; trial < 100; ++trial) {
    // A pool of publications, each with one fixed year: duplicates share years.
    struct Pub {
      std::string title, venue;
      int year;
    };
    std::vector<Pub> pool;
    const int pool_size = std::uniform_int_distribution<int>(1, 12)(rng);
    std::set<std::pair<std::string, std::string>> seen;
    while (static_cast<int>(pool.size()) < pool_size) {
      std::string t = words[rng() % words.size()] + " " + words[rng() % words.size()];
      const auto v = venues[rng() % venues.size()];
      if (!seen.insert({oracle::ascii_canonical(t), v}).second) continue;
      pool.push_back({t, v, 2000 + static_cast<int>(rng() % 4)});
    }
    const int n_sources = std::uniform_int_distribution<int>(1, 4)(rng);
    std::vector<SourceResults> input;
    std::vector<std::vector<oracle::Rec>> oinput;
    int uid = 0;
    for (int s = 0; s < n_sources; ++s) {
      std::vector<PublicationRecord> rs;
      std::vector<oracle::Rec> ors;
      const int n = std::uniform_int_distribution<int>(0, 10)(rng);
      for (int i = 0; i < n; ++i) {
        const auto& p = pool[rng() % pool.size()];
        auto t = p.title;
        if (rng() % 2) t[0] = static_cast<char>(std::toupper(t[0]));
        if (rng() % 3 == 0) t = "  " + t + ".";
        auto r = rec(t, p.year, static_cast<std::size_t>(i + 1), p.venue);
        const auto id = "r" + std::to_string(uid++);
        r.url = id;
        rs.push_back(r);
        ors.push_back({id, t, p.venue, p.year});
      }
      input.emplace_back("s" + std::to_string(s), rs);
      oinput.push_back(ors);
    }
    DedupStats st;
    const auto out = deduplicate(input, &st);
    std::vector<std::string> got;
    for (const auto& r : out) got.push_back(*r.url);
    ASSERT_EQ(got, oracle::dedup_all_pairs(oinput)) << "trial " << trial;

    // comparisons stay inside shared-year blocks of different sources
    std::map<int, std::size_t> seen_before;
    std::size_t bound = 0;
    for (const auto& [name, rs] : input) {
      for (const auto& r : rs) bound += seen_before[*r.date];
      for (const auto& r : rs) ++seen_before[*r.date];
    }
    EXPECT_LE(st.comparisons, bound);
  }
}
