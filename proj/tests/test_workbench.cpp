#include <gtest/gtest.h>

#include "scenario.hpp"

using namespace mindforge;

namespace {

json search(Workbench& wb) {
  return wb.start_search({{"base_query", "Naive Bayes"}, {"selected_ids", {"ID_naive_bayes"}}});
}

}  // namespace

TEST(Workbench, PreviewReportsNeighbourhoodAndTerms) {
  testutil::Scenario s;
  const auto p = s.workbench->preview({{"base_query", "Naive Bayes"}, {"selected_ids", {"ID_naive_bayes"}}});
  EXPECT_EQ(p["selected_ids"], json({"ID_naive_bayes"}));
  EXPECT_EQ(p["neighbourhood_ids"].size(), 4u);
  EXPECT_EQ(p["terms"].size(), 4u);
  EXPECT_EQ(p["query"], "naive bayes methods microrna prediction target");

  const auto deeper = s.workbench->preview(
      {{"selected_ids", {"ID_naive_bayes"}}, {"level", 2}, {"remove_ids", {"ID_which_methods"}}, {"k", 2}});
  EXPECT_GT(deeper["neighbourhood_ids"].size(), 4u);
  for (const auto& id : deeper["neighbourhood_ids"]) EXPECT_NE(id, "ID_which_methods");
  EXPECT_EQ(deeper["terms"].size(), 2u);
}

TEST(Workbench, SearchMergesBothSources) {
  testutil::Scenario s;
  const auto started = search(*s.workbench);
  EXPECT_EQ(started["count"], 8);
  const auto r = s.workbench->results(started["task_id"], std::nullopt);
  ASSERT_EQ(r["records"].size(), 8u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(r["records"][i]["source_id"], "dblp");
  for (int i = 5; i < 8; ++i) EXPECT_EQ(r["records"][i]["source_id"], "pubmed");
  EXPECT_EQ(r["dedup"]["removed"], 2);
  EXPECT_TRUE(s.fetcher.unexpected().empty());
}

TEST(Workbench, SearchWithSourceSubsetAndPlainQuery) {
  testutil::Scenario s;
  const auto started = s.workbench->start_search({{"base_query", "zzzz"}, {"sources", {"dblp"}}});
  EXPECT_EQ(started["count"], 0);
  EXPECT_EQ(started["diagnostics"].size(), 1u);
}

TEST(Workbench, FacetsCarryRecordIndices) {
  testutil::Scenario s;
  const auto id = search(*s.workbench)["task_id"].get<std::string>();
  const auto r = s.workbench->results(id, "date");
  std::size_t total = 0;
  for (const auto& g : r["groups"]) total += g["indices"].size();
  EXPECT_EQ(total, 8u);
  EXPECT_THROW(s.workbench->results(id, "regex:title:(?!x)"), Error);
}

TEST(Workbench, SupportAndImport) {
  testutil::Scenario s;
  const auto id = search(*s.workbench)["task_id"].get<std::string>();
  const auto sup = s.workbench->support(id, {{"record_index", 0}, {"kinds", {"Document", "Slides"}}});
  ASSERT_EQ(sup["materials"].size(), 2u);
  EXPECT_EQ(sup["materials"][0]["kind"], "Document");
  EXPECT_EQ(sup["materials"][0]["verified"], true);
  EXPECT_EQ(sup["materials"][1]["evidence"], "outline");

  const auto imp = s.workbench->import({{"task_id", id}, {"record_indices", {0, 5}}, {"target_node_id", "ID_naive_bayes"}});
  EXPECT_EQ(imp["attached"], 2);
  const auto again = s.workbench->import({{"task_id", id}, {"record_indices", {0}}, {"target_node_id", "ID_naive_bayes"}});
  EXPECT_EQ(again["skipped"], 1);
  EXPECT_TRUE(again["subtree_ids"].empty());

  const auto map = s.workbench->mindmap();
  const auto* nb = find_node(map, "ID_naive_bayes");
  const auto& first = nb->children[nb->children.size() - 2];
  EXPECT_EQ(first.text, "A Naive Bayes approach to microRNA target prediction");
  bool slides = false;
  for (const auto& c : first.children) slides = slides || c.text == "Slides";
  EXPECT_TRUE(slides);
  EXPECT_TRUE(s.fetcher.unexpected().empty());
}

TEST(Workbench, SupportErrorsAreReportedPerKind) {
  testutil::Scenario s;
  const auto id = search(*s.workbench)["task_id"].get<std::string>();
  // record 1 has no fixture pages for horizontal search
  const auto sup = s.workbench->support(id, {{"record_index", 1}, {"kinds", {"Document"}}});
  EXPECT_TRUE(sup["materials"].empty());
  ASSERT_EQ(sup["errors"].size(), 1u);
  EXPECT_EQ(sup["errors"][0]["code"], "FetchFailed");
  EXPECT_THROW(s.workbench->support(id, {{"record_index", 99}}), Error);
  EXPECT_THROW(s.workbench->support(id, {{"kinds", {"video"}}}), Error);
}

TEST(Workbench, SaveWritesParseableMap) {
  testutil::Scenario s;
  const auto id = search(*s.workbench)["task_id"].get<std::string>();
  s.workbench->import({{"task_id", id}, {"record_indices", {2}}, {"target_node_id", "ID_prediction"}});
  const auto out = s.workbench->save();
  EXPECT_EQ(out["path"], s.config.mindmap_path);
  const auto reread = parse_mindmap(testutil::slurp(s.config.mindmap_path));
  EXPECT_TRUE(structurally_equal(reread, s.workbench->mindmap()));
  EXPECT_FALSE(std::filesystem::exists(s.config.mindmap_path + ".tmp"));
}

TEST(Workbench, PutMindmapAcceptsXmlAndJson) {
  testutil::Scenario s;
  const auto j = s.workbench->mindmap_json();
  EXPECT_EQ(j["root"]["id"], "ID_microrna");
  auto edited = j;
  edited["root"]["children"].push_back({{"id", "ID_new"}, {"text", "New idea"}, {"kind", "Hot"}});
  EXPECT_EQ(s.workbench->put_mindmap(edited.dump())["ok"], true);
  const auto* n = find_node(s.workbench->mindmap(), "ID_new");
  ASSERT_NE(n, nullptr);
  EXPECT_EQ(n->kind, ElementKind::Hot);

  EXPECT_EQ(s.workbench->put_mindmap(R"(<map><node ID="r" TEXT="root"/></map>)")["node_count"], 1);
  edited["root"]["children"].push_back({{"id", "ID_new"}, {"text", "dup"}});
  EXPECT_THROW(s.workbench->put_mindmap(edited.dump()), Error);
  EXPECT_THROW(s.workbench->put_mindmap("{not json"), Error);
}

TEST(Workbench, UnknownTaskAndBadRequests) {
  testutil::Scenario s;
  try {
    s.workbench->results("t404", std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownTask);
    EXPECT_EQ(http_status(e.code()), 404);
  }
  EXPECT_THROW(s.workbench->start_search(json::object()), Error);
  EXPECT_THROW(s.workbench->import({{"task_id", "t1"}}), Error);
  EXPECT_EQ(http_status(ErrorCode::AllSourcesFailed), 502);
  EXPECT_EQ(http_status(ErrorCode::ZeroLevel), 400);
}

TEST(Workbench, CatalogAndSources) {
  testutil::Scenario s;
  EXPECT_GT(s.workbench->venues().size(), 10u);
  const auto src = s.workbench->sources();
  EXPECT_EQ(src["sources"][0]["name"], "dblp");
  EXPECT_EQ(src["engines"]["blog"], "blogsearch");
}

TEST(JsonMapping, RecordRoundTrip) {
  PublicationRecord r;
  r.title = "T";
  r.authors = {"A", "B"};
  r.venue_raw = "V";
  r.venue_norm = VenueEntry{"V", "Venue"};
  r.date = 2001;
  r.url = "http://u";
  r.source_id = "s";
  r.source_rank = 3;
  EXPECT_EQ(record_from_json(record_to_json(r)), r);
}

TEST(JsonMapping, NodeRoundTrip) {
  MindmapNode n;
  n.id = "a";
  n.text = "root";
  n.detail_note = "note";
  n.kind = ElementKind::Detail;
  n.cloud = true;
  n.icons = {"idea"};
  MindmapNode c;
  c.id = "b";
  c.link = "http://x";
  c.kind = ElementKind::Link;
  n.children.push_back(c);
  EXPECT_TRUE(structurally_equal(node_from_json(node_to_json(n)), n));
}
