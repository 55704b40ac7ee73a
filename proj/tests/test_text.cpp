#include <gtest/gtest.h>

#include "mindforge/text.hpp"
#include "mindforge/toml.hpp"
#include "mindforge/xml.hpp"

using namespace mindforge;

TEST(Tokenize, LowercasesAndStripsPunctuation) {
  EXPECT_EQ(text::tokenize("Which methods?"), (std::vector<std::string>{"which", "methods"}));
  EXPECT_EQ(text::tokenize("  Naive   Bayes, (again)!"), (std::vector<std::string>{"naive", "bayes", "again"}));
}

TEST(Tokenize, InnerHyphenSurvives) {
  EXPECT_EQ(text::tokenize("rank-based -- similarity- -x"),
            (std::vector<std::string>{"rank-based", "similarity", "x"}));
}

TEST(Tokenize, FoldsNonAscii) {
  EXPECT_EQ(text::tokenize("ÉTUDE Ωmega Привет"), (std::vector<std::string>{"étude", "ωmega", "привет"}));
}

TEST(Tokenize, ApostropheJoins) { EXPECT_EQ(text::tokenize("don't"), (std::vector<std::string>{"dont"})); }

TEST(Canonical, PunctuationSeparates) {
  EXPECT_EQ(text::canonical("  A Naive-Bayes  approach: microRNA. "), "a naive bayes approach microrna");
  EXPECT_EQ(text::canonical("a-b"), text::canonical("a b"));
  EXPECT_EQ(text::canonical("!!!"), "");
}

TEST(Utf8, InvalidBytesBecomeReplacement) {
  const std::string bad = "a\xFF" "b";
  const auto cps = text::decode(bad);
  ASSERT_EQ(cps.size(), 3u);
  EXPECT_EQ(cps[1], text::kReplacement);
  EXPECT_EQ(text::length("日本語"), 3u);
}

TEST(Utf8, Latin1Conversion) { EXPECT_EQ(text::latin1_to_utf8("caf\xE9"), "café"); }

TEST(Whitespace, CollapseAndTrim) {
  EXPECT_EQ(text::collapse_whitespace("\n  a \t b  "), "a b");
  EXPECT_EQ(text::trim("  x y \r\n"), "x y");
}

TEST(Lines, SplitHandlesCrLf) {
  const auto lines = text::split_lines("a\r\nb\n\nc");
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "a");
  EXPECT_EQ(lines[2], "");
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(text::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(text::fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Xml, ParsesEntitiesAndCdata) {
  const auto doc = xml::parse("<?xml version=\"1.0\"?><r a=\"&lt;&#65;\"><![CDATA[<x>]]>&amp;</r>");
  EXPECT_EQ(doc->name, "r");
  EXPECT_EQ(doc->attribute_or("a"), "<A");
  EXPECT_EQ(doc->text_content(), "<x>&");
}

TEST(Xml, RejectsMalformed) {
  for (const char* bad : {"<a>", "<a></b>", "<a b=c/>", "", "<a/><b/>", "<a>&bogus;</a>"}) {
    try {
      xml::parse(bad);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedXml) << bad;
    }
  }
}

TEST(Xml, SerializeReparses) {
  const auto doc = xml::parse("<r x=\"&quot;q&quot;\"><c>1 &lt; 2</c><d/></r>");
  const auto again = xml::parse(xml::to_string(*doc));
  EXPECT_TRUE(xml::equal(*doc, *again));
}

TEST(Toml, TablesArraysAndStrings) {
  const auto j = toml::parse(R"(
# comment
name = "x\ty"   # trailing
path = 'C:\raw'
n = 3
f = 2.5
on = true
list = [1, 2, 3]
[server]
port = 9090
[[items]]
a = 1
[items.sub]
b = "q"
[[items]]
a = 2
)");
  EXPECT_EQ(j["name"], "x\ty");
  EXPECT_EQ(j["path"], "C:\\raw");
  EXPECT_EQ(j["n"], 3);
  EXPECT_DOUBLE_EQ(j["f"].get<double>(), 2.5);
  EXPECT_EQ(j["on"], true);
  EXPECT_EQ(j["list"].size(), 3u);
  EXPECT_EQ(j["server"]["port"], 9090);
  ASSERT_EQ(j["items"].size(), 2u);
  EXPECT_EQ(j["items"][0]["sub"]["b"], "q");
  EXPECT_EQ(j["items"][1]["a"], 2);
}

TEST(Toml, ErrorsCarryLineNumbers) {
  try {
    toml::parse("a = 1\nb = \n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(toml::parse("a = 1\na = 2\n"), Error);
}
