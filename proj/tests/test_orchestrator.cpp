#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "mindforge/orchestrator.hpp"

using namespace mindforge;
using namespace std::chrono_literals;

namespace {

PublicationRecord rec(const std::string& title, int year, const std::string& venue) {
  PublicationRecord r;
  r.title = title;
  r.date = year;
  r.venue_raw = venue;
  r.authors = {"Ada Lovelace"};
  return r;
}

class FakeSource : public SourceAdapter {
 public:
  FakeSource(std::string name, std::vector<PublicationRecord> rs, std::chrono::milliseconds delay = 0ms,
             bool fail = false)
      : name_(std::move(name)), rs_(std::move(rs)), delay_(delay), fail_(fail) {}
  std::string name() const override { return name_; }
  std::vector<PublicationRecord> search(const std::string& q, std::size_t limit) override {
    last_query = q;
    last_limit = limit;
    std::this_thread::sleep_for(delay_);
    if (fail_) throw Error(ErrorCode::FetchFailed, "down");
    return rs_;
  }
  std::string last_query;
  std::size_t last_limit = 0;

 private:
  std::string name_;
  std::vector<PublicationRecord> rs_;
  std::chrono::milliseconds delay_;
  bool fail_;
};

SearchTask task(std::vector<std::string> sources, std::size_t limit = 10) {
  SearchTask t;
  t.task_id = "t";
  t.query.base_terms = {"naive", "bayes"};
  t.sources = std::move(sources);
  t.limit = limit;
  return t;
}

const VenueCatalog& catalog() {
  static const VenueCatalog c({{"VLDB", "Very Large Database Conference"}, {"KDD", "Knowledge Discovery and Data Mining"}});
  return c;
}

class FakeEngine : public SearchEngine {
 public:
  std::map<std::string, std::vector<EngineHit>> by_filetype;
  std::vector<EngineQuery> queries;
  std::string name() const override { return "fake"; }
  std::vector<EngineHit> search(const EngineQuery& q) override {
    queries.push_back(q);
    auto it = by_filetype.find(q.filetype.value_or(""));
    return it == by_filetype.end() ? std::vector<EngineHit>{} : it->second;
  }
};

class FakeExtractor : public TextExtractor {
 public:
  std::map<std::string, std::string> texts;
  ExtractedText extract(const std::string& url) override {
    auto it = texts.find(url);
    if (it == texts.end()) return {"", false};
    return {it->second, true};
  }
};

const char* kDocText =
    "Mining Frequent Graphs Quickly\nAda Lovelace\n\nAbstract\nWe mine graphs.\nQuickly.\n\n"
    "1 Introduction\nText.\n2 Related Work\nMore.\n3 Method\n4. Evaluation Results\n";

}  // namespace

TEST(SourceRegistry, RejectsRepeatedNameOrPriority) {
  SourceRegistry r;
  r.add({"a", 1, std::make_shared<FakeSource>("a", std::vector<PublicationRecord>{})});
  EXPECT_THROW(r.add({"a", 2, nullptr}), Error);
  EXPECT_THROW(r.add({"b", 1, nullptr}), Error);
  r.add({"b", 0, std::make_shared<FakeSource>("b", std::vector<PublicationRecord>{})});
  EXPECT_EQ(r.all().front().name, "b");
}

TEST(VerticalSearch, MergeOrderIgnoresCompletionOrder) {
  SourceRegistry r;
  auto slow = std::make_shared<FakeSource>("slow", std::vector<PublicationRecord>{rec("A", 2001, "VLDB Conf"), rec("B", 2002, "KDD")}, 150ms);
  auto fast = std::make_shared<FakeSource>("fast", std::vector<PublicationRecord>{rec("a.", 2001, "Very Large Database Conf"), rec("C", 2003, "KDD")});
  r.add({"slow", 1, slow});
  r.add({"fast", 2, fast});
  const auto out = vertical_search(task({"fast", "slow"}), r, catalog());
  ASSERT_EQ(out.records.size(), 3u);
  EXPECT_EQ(out.records[0].title, "A");
  EXPECT_EQ(out.records[0].source_id, "slow");
  EXPECT_EQ(out.records[1].title, "B");
  EXPECT_EQ(out.records[2].title, "C");
  EXPECT_EQ(out.records[2].source_rank, 2u);
  EXPECT_EQ(out.dedup.removed, 1u);
  EXPECT_EQ(out.records[0].venue_norm->acronym, "VLDB");
  EXPECT_EQ(slow->last_query, "naive bayes");
}

TEST(VerticalSearch, LimitTruncatesEachSource) {
  SourceRegistry r;
  std::vector<PublicationRecord> many;
  for (int i = 0; i < 7; ++i) many.push_back(rec("t" + std::to_string(i), 2000 + i, "KDD"));
  auto s = std::make_shared<FakeSource>("s", many);
  r.add({"s", 1, s});
  const auto out = vertical_search(task({"s"}, 3), r, catalog());
  EXPECT_EQ(out.records.size(), 3u);
  EXPECT_EQ(s->last_limit, 3u);
  EXPECT_EQ(out.diagnostics[0].count, 3u);
}

TEST(VerticalSearch, FailingAndSlowSourcesDegrade) {
  SourceRegistry r;
  r.add({"ok", 1, std::make_shared<FakeSource>("ok", std::vector<PublicationRecord>{rec("A", 2001, "KDD")})});
  r.add({"bad", 2, std::make_shared<FakeSource>("bad", std::vector<PublicationRecord>{}, 0ms, true)});
  r.add({"hung", 3, std::make_shared<FakeSource>("hung", std::vector<PublicationRecord>{rec("Z", 2001, "KDD")}, 2000ms)});
  VerticalOptions o;
  o.timeout = 200ms;
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = vertical_search(task({"ok", "bad", "hung"}), r, catalog(), o);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, 1500ms);
  ASSERT_EQ(out.records.size(), 1u);
  ASSERT_EQ(out.diagnostics.size(), 3u);
  EXPECT_EQ(out.diagnostics[0].status, "ok");
  EXPECT_EQ(out.diagnostics[1].status, "failed");
  EXPECT_EQ(out.diagnostics[1].error_code, "FetchFailed");
  EXPECT_EQ(out.diagnostics[2].status, "timeout");
}

TEST(VerticalSearch, Errors) {
  SourceRegistry r;
  r.add({"bad", 1, std::make_shared<FakeSource>("bad", std::vector<PublicationRecord>{}, 0ms, true)});
  const auto code = [&](const SearchTask& t) {
    try {
      vertical_search(t, r, catalog());
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::BadRequest;
  };
  EXPECT_EQ(code(task({"bad"})), ErrorCode::AllSourcesFailed);
  EXPECT_EQ(code(task({"nope"})), ErrorCode::UnknownSource);
  EXPECT_EQ(code(task({})), ErrorCode::PreconditionFailed);
  EXPECT_EQ(code(task({"bad"}, 0)), ErrorCode::PreconditionFailed);
}

TEST(SectionHeadings, NumberedLinesOnly) {
  EXPECT_EQ(section_headings(kDocText),
            (std::vector<std::string>{"Introduction", "Related Work", "Method", "Evaluation Results"}));
}

TEST(FindDocument, FirstCandidateContainingTitleWins) {
  FakeEngine eng;
  eng.by_filetype["pdf"] = {{"Review", "http://r.pdf", ""}, {"Paper", "http://p.pdf", ""}};
  FakeExtractor ex;
  ex.texts["http://r.pdf"] = "A review of graph mining.";
  ex.texts["http://p.pdf"] = kDocText;
  const auto d = find_document(rec("Mining frequent graphs, quickly!", 2001, "KDD"), eng, ex);
  EXPECT_TRUE(d.verified);
  EXPECT_EQ(*d.url, "http://p.pdf");
  EXPECT_EQ(d.evidence, "title-substring");
  EXPECT_EQ(d.section_terms.size(), 4u);
  ASSERT_FALSE(eng.queries.empty());
  EXPECT_EQ(eng.queries[0].text, "\"Mining frequent graphs, quickly!\"");
  EXPECT_EQ(*eng.queries[0].filetype, "pdf");
}

TEST(FindDocument, UnverifiedFallbackAndNoCandidates) {
  FakeEngine eng;
  FakeExtractor ex;
  try {
    find_document(rec("T", 2001, "KDD"), eng, ex);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoCandidates);
  }
  eng.by_filetype["doc"] = {{"Other", "http://o.doc", ""}};
  const auto d = find_document(rec("T", 2001, "KDD"), eng, ex);
  EXPECT_FALSE(d.verified);
  EXPECT_EQ(*d.url, "http://o.doc");
}

TEST(ExtractAbstract, MetadataThenDocument) {
  FakeExtractor ex;
  ex.texts["http://p.pdf"] = kDocText;
  auto r = rec("Mining Frequent Graphs Quickly", 2001, "KDD");
  SupportMaterial doc{MaterialKind::Document, "http://p.pdf", "Paper", true, "title-substring", {}};
  const auto a = extract_abstract(r, doc, ex);
  EXPECT_EQ(*a.text, "We mine graphs. Quickly.");
  r.abstract = "From metadata.";
  const auto m = extract_abstract(r, doc, ex);
  EXPECT_EQ(*m.text, "From metadata.");
  EXPECT_TRUE(m.verified);
  r.abstract.reset();
  try {
    extract_abstract(r, std::nullopt, ex);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AbstractNotFound);
  }
}

TEST(FindSlides, OutlineOrSectionEvidence) {
  FakeEngine eng;
  FakeExtractor ex;
  eng.by_filetype["ppt"] = {{"deck1", "http://d1.ppt", ""}, {"deck2", "http://d2.ppt", ""}};
  ex.texts["http://d1.ppt"] = "Title slide\nThanks";
  ex.texts["http://d2.ppt"] = "Intro\nRelated work and the method";
  const std::vector<std::string> terms = {"Introduction", "Related Work", "Method"};
  const auto s = find_slides(rec("T", 2001, "KDD"), eng, ex, terms, 2);
  EXPECT_TRUE(s.verified);
  EXPECT_EQ(*s.url, "http://d2.ppt");
  EXPECT_EQ(s.evidence, "sections:2/3 (m=2)");

  ex.texts["http://d1.ppt"] = "OUTLINE\n1. motivation";
  const auto o = find_slides(rec("T", 2001, "KDD"), eng, ex, {}, 2);
  EXPECT_EQ(o.evidence, "outline");
  EXPECT_EQ(*o.url, "http://d1.ppt");

  ex.texts.clear();
  const auto u = find_slides(rec("T", 2001, "KDD"), eng, ex, terms, 2);
  EXPECT_FALSE(u.verified);
  EXPECT_EQ(*u.url, "http://d1.ppt");
  EXPECT_NE(u.evidence.find("no-outline"), std::string::npos);
}

TEST(BlogPosts, QueryUsesFirstAuthorFamilyName) {
  FakeEngine eng;
  eng.by_filetype[""] = {{"post", "http://b/1", ""}};
  auto r = rec("Graph mining", 2001, "KDD");
  r.authors = {"Grace  Brewster Hopper", "X"};
  const auto posts = find_blog_posts(r, eng);
  ASSERT_EQ(posts.size(), 1u);
  EXPECT_FALSE(posts[0].verified);
  EXPECT_EQ(eng.queries.back().text, "Graph mining Hopper");
  EXPECT_FALSE(eng.queries.back().filetype);
  eng.by_filetype.clear();
  EXPECT_THROW(find_blog_posts(r, eng), Error);
  r.authors.clear();
  EXPECT_THROW(first_author_family_name(r), Error);
}

TEST(MaterialKind, NamesRoundTrip) {
  for (auto k : {MaterialKind::Document, MaterialKind::Abstract, MaterialKind::Slides, MaterialKind::BlogPost})
    EXPECT_EQ(material_from_name(material_name(k)), k);
  EXPECT_FALSE(material_from_name("video"));
}
