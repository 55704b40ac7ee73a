#include <gtest/gtest.h>

#include <filesystem>

#include "mindforge/mindmap.hpp"
#include "support.hpp"

using namespace mindforge;

namespace {

std::vector<std::filesystem::path> corpus() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(testutil::data_dir() / "maps"))
    if (e.path().extension() == ".mm") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

Mindmap load(const std::string& name) { return parse_mindmap(testutil::slurp(testutil::data_dir() / "maps" / name)); }

}  // namespace

TEST(MindmapCorpus, HasAtLeastTenMaps) { EXPECT_GE(corpus().size(), 10u); }

TEST(MindmapCorpus, ParseSerializeIsIdentity) {
  for (const auto& path : corpus()) {
    SCOPED_TRACE(path.filename().string());
    const auto m1 = parse_mindmap(testutil::slurp(path));
    const auto text1 = serialize_mindmap(m1);
    const auto m2 = parse_mindmap(text1);
    EXPECT_TRUE(structurally_equal(m1, m2));
    EXPECT_EQ(serialize_mindmap(m2), text1);
    EXPECT_NO_THROW(validate(m2));
  }
}

TEST(MindmapParse, MicroRnaScenarioMap) {
  const auto m = load("microrna.mm");
  const auto* nb = find_node(m, "ID_naive_bayes");
  ASSERT_NE(nb, nullptr);
  EXPECT_EQ(nb->text, "Naive Bayes");
  EXPECT_EQ(nb->kind, ElementKind::Topic);
  const auto* q = find_node(m, "ID_which_methods");
  ASSERT_NE(q, nullptr);
  EXPECT_EQ(q->kind, ElementKind::Question);
  const auto* t = find_node(m, "ID_training_idea");
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->kind, ElementKind::Detail);
  ASSERT_TRUE(t->detail_note.has_value());
  EXPECT_EQ(*t->detail_note, "Training learning functions using Naive Bayes models");
}

TEST(MindmapParse, KindInference) {
  const auto m = load("kinds.mm");
  const std::vector<std::pair<std::string, ElementKind>> expected = {
      {"ID_k1", ElementKind::Topic},        {"ID_k2", ElementKind::LargerTopic},   {"ID_k3", ElementKind::WaitingTopic},
      {"ID_k4", ElementKind::NeedsAction},  {"ID_k5", ElementKind::Hot},           {"ID_k6", ElementKind::Detail},
      {"ID_k7", ElementKind::Link},         {"ID_k8", ElementKind::KeywordsObject}, {"ID_k9", ElementKind::CodeObject},
      {"ID_k10", ElementKind::Question},    {"ID_k11", ElementKind::Cloud},        {"ID_k12", ElementKind::Hot},
      {"ID_k13", ElementKind::Detail},
  };
  for (const auto& [id, kind] : expected) {
    const auto* n = find_node(m, id);
    ASSERT_NE(n, nullptr) << id;
    EXPECT_EQ(n->kind, kind) << id;
  }
}

TEST(MindmapParse, RejectsDuplicateIds) {
  const char* doc = R"(<map version="1.0.1"><node ID="a" TEXT="r"><node ID="b" TEXT="x"/><node ID="b" TEXT="y"/></node></map>)";
  try {
    parse_mindmap(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateId);
  }
}

TEST(MindmapParse, RejectsRootIdReusedDeep) {
  const char* doc = R"(<map><node ID="a" TEXT="r"><node ID="b"><node ID="c"><node ID="a"/></node></node></node></map>)";
  EXPECT_THROW(parse_mindmap(doc), Error);
}

TEST(MindmapParse, SynthesizedIdsAvoidExplicitOnes) {
  const auto m = parse_mindmap(R"(<map><node TEXT="r"><node ID="ID_0" TEXT="x"/><node TEXT="y"/></node></map>)");
  const auto ids = collect_ids(m.root);
  const std::set<std::string> unique(ids.begin(), ids.end());
  EXPECT_EQ(unique.size(), ids.size());
  EXPECT_EQ(m.root.children[0].id, "ID_0");
}

TEST(MindmapParse, NotAMindmap) {
  try {
    parse_mindmap("<html/>");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAMindmap);
  }
  try {
    parse_mindmap("<map><node TEXT=\"x\">");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedXml);
  }
}

TEST(MindmapParse, UnknownElementsAreDroppedWithWarning) {
  std::vector<std::string> warnings;
  const auto saved = warning_sink();
  warning_sink() = [&](std::string_view w) { warnings.emplace_back(w); };
  const auto m = parse_mindmap(R"(<map><node ID="r" TEXT="r"><font SIZE="12"/><edge/><font/></node></map>)");
  warning_sink() = saved;
  EXPECT_EQ(m.root.children.size(), 0u);
  EXPECT_EQ(warnings.size(), 2u);  // one per element name
}

TEST(MindmapValidate, DetectsDuplicateAfterEdit) {
  auto m = load("single.mm");
  MindmapNode child;
  child.id = m.root.id;
  child.text = "clash";
  m.root.children.push_back(child);
  try {
    validate(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateId);
  }
}

TEST(AttachSubtree, AppendsAsLastChild) {
  auto m = load("clustering.mm");
  MindmapNode s;
  s.id = "ID_new";
  s.text = "new";
  const auto before = find_node(m, "ID_improve")->children.size();
  const auto out = attach_subtree(m, "ID_improve", s);
  const auto* target = find_node(out, "ID_improve");
  ASSERT_EQ(target->children.size(), before + 1);
  EXPECT_EQ(target->children.back().id, "ID_new");
  EXPECT_EQ(find_node(m, "ID_improve")->children.size(), before);
}

TEST(AttachSubtree, Errors) {
  const auto m = load("clustering.mm");
  MindmapNode s;
  s.id = "ID_snn";
  try {
    attach_subtree(m, "ID_improve", s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IdCollision);
  }
  s.id = "fresh";
  try {
    attach_subtree(m, "nope", s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownNode);
  }
}

TEST(IdGenerator, SeededIsDeterministic) {
  IdGenerator a(7), b(7);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(a.next(), b.next());
  EXPECT_EQ(IdGenerator(1).next().rfind("ID_", 0), 0u);
}

TEST(MindmapSerialize, EscapesAndNotes) {
  Mindmap m;
  m.root.id = "r";
  m.root.text = "a \"quoted\" <tag> & more";
  m.root.detail_note = "line one\nline <two>";
  m.root.kind = ElementKind::Detail;
  const auto back = parse_mindmap(serialize_mindmap(m));
  EXPECT_TRUE(structurally_equal(m, back));
}

TEST(MindmapSerialize, ExplicitKindPersists) {
  Mindmap m;
  m.root.id = "r";
  m.root.text = "x";
  m.root.kind = ElementKind::NeedsAction;
  const auto back = parse_mindmap(serialize_mindmap(m));
  EXPECT_EQ(back.root.kind, ElementKind::NeedsAction);
}
