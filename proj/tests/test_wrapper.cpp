#include <gtest/gtest.h>

#include <random>

#include "mindforge/fetch.hpp"
#include "mindforge/html.hpp"
#include "mindforge/wrapper.hpp"
#include "mindforge/xpath.hpp"
#include "generators.hpp"
#include "support.hpp"

using namespace mindforge;
using namespace mindforge::wrapper;

namespace {

std::string pages() { return (testutil::data_dir() / "fixtures" / "pages").string(); }

WrapperConfig blog_config() { return parse_config(testutil::slurp(testutil::data_dir() / "wrappers" / "blog.xml")); }

const xml::NodeList& nodes(const ExecutionContext& ctx, const std::string& name) {
  return std::get<xml::NodeList>(*ctx.get(name));
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::BadRequest;
}

}  // namespace

TEST(WrapperConfig, BlogListingStructure) {
  const auto cfg = blog_config();
  ASSERT_EQ(cfg.var_defs.size(), 4u);
  EXPECT_EQ(cfg.var_defs[0].name, "searchQuery");
  EXPECT_FALSE(cfg.var_defs[0].overwrite);
  EXPECT_EQ(cfg.var_defs[1].name, "content");
  EXPECT_EQ(cfg.var_defs[2].name, "results1");
  EXPECT_EQ(cfg.var_defs[3].name, "results2");
  const auto* html = std::get_if<HtmlToXml>(&cfg.var_defs[1].pipeline->op);
  ASSERT_NE(html, nullptr);
  const auto* http = std::get_if<Http>(&html->inner->op);
  ASSERT_NE(http, nullptr);
  EXPECT_NE(http->url_template.find("${searchQuery}"), std::string::npos);
  const auto* xp = std::get_if<XPath>(&cfg.var_defs[2].pipeline->op);
  ASSERT_NE(xp, nullptr);
  EXPECT_EQ(xp->expression, "//a[contains(@id,'p-')]");
  EXPECT_TRUE(std::holds_alternative<VarRef>(xp->inner->op));
}

TEST(WrapperExecute, UbuntuPins) {
  FixtureFetcher f(pages());
  const auto ctx = execute(blog_config(), {{"searchQuery", "ubuntu"}}, f.as_fetcher());
  const auto& r1 = nodes(ctx, "results1");
  ASSERT_EQ(r1.size(), 2u);
  EXPECT_EQ(r1[0]->attribute_or("id"), "p-1");
  EXPECT_EQ(r1[1]->attribute_or("id"), "p-2");
  EXPECT_EQ(text::collapse_whitespace(r1[0]->text_content()),
            "How To Upgrade Ubuntu 10.04 (Lucid Lynx) To 10.10 (Maverick Meerkat) (Desktop; Server)");
  EXPECT_NE(r1[1]->text_content().find("Latest Ubuntu 10.10 Emphasizes the Cloud"), std::string::npos);
  const auto& r2 = nodes(ctx, "results2");
  ASSERT_EQ(r2.size(), 1u);
  EXPECT_EQ(r2[0]->name, "td");
  EXPECT_EQ(r2[0]->attribute_or("class"), "j");
  ASSERT_EQ(ctx.requested_urls.size(), 1u);
  EXPECT_NE(ctx.requested_urls[0].find("q=ubuntu&"), std::string::npos);
  EXPECT_TRUE(f.unexpected().empty());
}

TEST(WrapperExecute, CallerBindingSurvivesOverwriteFalse) {
  const auto cfg = parse_config(R"(<config><var-def name="q" overwrite="false">default</var-def><var-def name="r">x</var-def></config>)");
  EXPECT_EQ(std::get<std::string>(*execute(cfg, {{"q", "mine"}}, nullptr).get("q")), "mine");
  EXPECT_EQ(std::get<std::string>(*execute(cfg, {}, nullptr).get("q")), "default");
}

TEST(WrapperExecute, Errors) {
  EXPECT_EQ(code_of([] { parse_config("<config><var-def name='a'><bogus/></var-def></config>"); }),
            ErrorCode::UnknownProcessor);
  EXPECT_EQ(code_of([] { parse_config("<config><var-def name='a'/><var-def name='a'/></config>"); }),
            ErrorCode::DuplicateVarDef);
  EXPECT_EQ(code_of([] { parse_config("<config><var-def name='a'><http/></var-def></config>"); }),
            ErrorCode::MalformedConfig);
  EXPECT_EQ(code_of([] { parse_config("<config>"); }), ErrorCode::MalformedConfig);
  EXPECT_EQ(code_of([] { parse_config("<config/>"); }), ErrorCode::MalformedConfig);

  const auto unbound = parse_config("<config><var-def name='c'><http url='http://h/${missing}'/></var-def></config>");
  EXPECT_EQ(code_of([&] { execute(unbound, {}, [](const std::string&) { return std::string(); }); }),
            ErrorCode::UnboundVariable);

  const auto text_xpath = parse_config("<config><var-def name='t'>plain</var-def>"
                                       "<var-def name='x'><xpath expression='//a'><var name='t'/></xpath></var-def></config>");
  EXPECT_EQ(code_of([&] { execute(text_xpath, {}, nullptr); }), ErrorCode::TypeMismatch);

  const auto bad_xpath = parse_config("<config><var-def name='c'><html-to-xml><http url='http://h/'/></html-to-xml></var-def>"
                                      "<var-def name='x'><xpath expression='//a[@id &gt; 3]'><var name='c'/></xpath></var-def></config>");
  EXPECT_EQ(code_of([&] { execute(bad_xpath, {}, [](const std::string&) { return std::string("<a/>"); }); }),
            ErrorCode::XPathError);
}

TEST(WrapperExecute, FetcherFailurePropagates) {
  FixtureFetcher f(pages());
  const auto cfg = blog_config();
  EXPECT_EQ(code_of([&] { execute(cfg, {{"searchQuery", "not in fixtures"}}, f.as_fetcher()); }), ErrorCode::FetchFailed);
  ASSERT_EQ(f.unexpected().size(), 1u);
}

TEST(WrapperExecute, Latin1PagesAreTranscoded) {
  const auto cfg = parse_config("<config charset='ISO-8859-1'><var-def name='c'><http url='http://h/'/></var-def></config>");
  const auto ctx = execute(cfg, {}, [](const std::string&) { return std::string("M\xFCller"); });
  EXPECT_EQ(std::get<std::string>(*ctx.get("c")), "Müller");
}

TEST(UrlEscape, UnreservedSetOnly) {
  EXPECT_EQ(url_escape("a b&c=d/é~._-"), "a%20b%26c%3Dd%2F%C3%A9~._-");
  EXPECT_EQ(substitute("http://h/?q=${ q }&x=1", {{"q", Value{std::string("\"x y\"")}}}), "http://h/?q=%22x%20y%22&x=1");
}

TEST(XPath, SupportedSubset) {
  const auto doc = html::html_to_xml("<div><a id='p-1' href='u1'>one</a><p><a id='q' href='u2'>two</a></p>"
                                     "<a id='p-2' class='k'>three</a></div>");
  EXPECT_EQ(xpath::eval(doc, "//a").size(), 3u);
  EXPECT_EQ(xpath::eval(doc, "//a[contains(@id,'p-')]").size(), 2u);
  EXPECT_EQ(xpath::eval(doc, "//a[@class='k']").size(), 1u);
  EXPECT_EQ(xpath::eval(doc, "//a[@href]").size(), 2u);
  EXPECT_EQ(xpath::eval(doc, "/html/div/a").size(), 2u);
  EXPECT_EQ(xpath::eval(doc, "/html/div/a[2]")[0]->attribute_or("id"), "p-2");
  EXPECT_EQ(xpath::eval(doc, "//p/*").size(), 1u);
  EXPECT_TRUE(xpath::eval(doc, "//table").empty());
}

TEST(XPath, RejectsOutsideSubset) {
  EXPECT_EQ(code_of([] { xpath::compile("a/b"); }), ErrorCode::UnsupportedXPath);
  EXPECT_EQ(code_of([] { xpath::compile("//a | //b"); }), ErrorCode::UnsupportedXPath);
  EXPECT_EQ(code_of([] { xpath::compile("//a/@href"); }), ErrorCode::UnsupportedXPath);
  EXPECT_EQ(code_of([] { xpath::compile("//a[position()<3]"); }), ErrorCode::UnsupportedXPath);
  EXPECT_EQ(code_of([] { xpath::compile("//a[@id='x'"); }), ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { xpath::compile(""); }), ErrorCode::SyntaxError);
}

TEST(HtmlToXml, RepairsCommonBreakage) {
  const auto doc = html::html_to_xml("<p>one<p>two<br><img src=x><table><tr><td class=j>c</table>&nbsp;&amp;");
  ASSERT_EQ(doc.size(), 1u);
  EXPECT_EQ(doc[0]->name, "html");
  EXPECT_EQ(xpath::eval(doc, "//p").size(), 2u);
  EXPECT_EQ(xpath::eval(doc, "//td[@class='j']").size(), 1u);
  const auto again = xml::parse(xml::to_string(*doc[0]));
  EXPECT_TRUE(xml::equal(*doc[0], *again));
}

TEST(HtmlToXml, ScriptContentIsRawText) {
  const auto doc = html::html_to_xml("<script>if (a < b && c) { x = '</div>'; }</script><a id=p-1>t</a>");
  EXPECT_EQ(xpath::eval(doc, "//a").size(), 1u);
}

TEST(HtmlToXml, FuzzAlwaysReparses) {
  std::mt19937 rng(1234);
  for (int i = 0; i < 1000; ++i) {
    const auto soup = gen::tag_soup(rng);
    xml::NodeList doc;
    ASSERT_NO_THROW(doc = html::html_to_xml(soup)) << soup;
    ASSERT_EQ(doc.size(), 1u);
    const auto serialized = xml::to_string(*doc[0]);
    xml::NodePtr back;
    ASSERT_NO_THROW(back = xml::parse(serialized)) << soup << "\n=> " << serialized;
    EXPECT_TRUE(xml::equal(*doc[0], *back)) << soup;
  }
}

TEST(ResultMapping, ZipsColumnsIntoRecords) {
  FixtureFetcher f(pages());
  const auto ctx = execute(blog_config(), {{"searchQuery", "ubuntu"}}, f.as_fetcher());
  const auto m = ResultMapping::from({{"title", "results1"}, {"url", "results1@href"}, {"abstract", "results2"}});
  const auto rs = records_from(ctx, m, "blog");
  ASSERT_EQ(rs.size(), 2u);
  EXPECT_EQ(rs[0].source_rank, 1u);
  EXPECT_EQ(rs[1].source_rank, 2u);
  EXPECT_EQ(rs[0].source_id, "blog");
  ASSERT_TRUE(rs[1].url);
  EXPECT_EQ(*rs[1].url, "http://www.readwriteweb.com/cloud/2010/10/latest-ubuntu-1010-emphasizes.php");
  EXPECT_TRUE(rs[0].abstract.has_value());
  EXPECT_FALSE(rs[1].abstract.has_value());
}

TEST(ResultMapping, Validation) {
  EXPECT_THROW(ResultMapping::from({{"url", "x"}}), Error);
  EXPECT_THROW(ResultMapping::from({{"title", "x"}, {"colour", "y"}}), Error);
  EXPECT_THROW(ResultMapping::from({{"title", "x"}}).validate_against(blog_config()), Error);
}

TEST(FieldHelpers, YearsAndAuthors) {
  EXPECT_EQ(extract_year("Nucleic Acids Res. 2009 Jun;37(10)"), 2009);
  EXPECT_FALSE(extract_year("vol 12345"));
  EXPECT_FALSE(extract_year("1850"));
  EXPECT_EQ(split_authors("Anna Keller, Marco Rossi and Jun Li; X"),
            (std::vector<std::string>{"Anna Keller", "Marco Rossi", "Jun Li", "X"}));
}

TEST(FixtureFetcher, NamesByUrlHash) {
  EXPECT_EQ(fixture_name("http://dblp.fixture/search?q=zzzz", ".html"), "605bf8f238e66d3a.html");
  FixtureFetcher f(pages());
  EXPECT_FALSE(f("http://dblp.fixture/search?q=zzzz").empty());
  EXPECT_EQ(f.requested().size(), 1u);
  EXPECT_TRUE(f.unexpected().empty());
}
