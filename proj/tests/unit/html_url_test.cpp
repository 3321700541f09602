#include <gtest/gtest.h>

#include "grasp/html.hpp"
#include "grasp/url.hpp"

namespace grasp {
namespace {

using html::Token;

TEST(Tokenize, StartEndAndText) {
  const auto t = html::tokenize("<P Class=\"a\">Hi <b>there</b></p>");
  ASSERT_EQ(t.size(), 6u);
  EXPECT_EQ(t[0].kind, Token::Kind::kStartTag);
  EXPECT_EQ(t[0].name, "p");
  ASSERT_NE(t[0].attribute("class"), nullptr);
  EXPECT_EQ(*t[0].attribute("class"), "a");
  EXPECT_EQ(t[1].text, "Hi ");
  EXPECT_EQ(t[5].kind, Token::Kind::kEndTag);
}

TEST(Tokenize, CommentsAndDoctypeSkipped) {
  const auto t = html::tokenize("<!DOCTYPE html><!-- <a href=x> --><i>");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].name, "i");
}

TEST(Tokenize, AttributeForms) {
  const auto t = html::tokenize("<a href=/x?a=1&amp;b=2 data-x='q' checked/>");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(*t[0].attribute("href"), "/x?a=1&b=2");
  EXPECT_EQ(*t[0].attribute("data-x"), "q");
  EXPECT_NE(t[0].attribute("checked"), nullptr);
  EXPECT_TRUE(t[0].self_closing);
}

TEST(Tokenize, ScriptContentIsNotMarkup) {
  const auto t = html::tokenize("<script>if (a < b) { x = '<a href=\"/y\">'; }</script><p>");
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t[1].kind, Token::Kind::kText);
  EXPECT_EQ(t[3].name, "p");
}

TEST(Tokenize, NeverThrowsOnGarbage) {
  for (const char* s : {"<", "<<>>", "</", "<a href=\"unterminated", "<!--", "&#xFFFFFFFFF;", "< p>"}) {
    EXPECT_NO_THROW(html::tokenize(s)) << s;
  }
}

TEST(Tokenize, StrayLessThanIsText) {
  const auto t = html::tokenize("1 < 2");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].text, "1 < 2");
}

TEST(BuildTree, DepthsAndRepair) {
  const auto e = html::build_tree(html::tokenize("<html><body><p><br></p><p></body></html>"));
  ASSERT_EQ(e.size(), 5u);
  EXPECT_EQ(e[0].depth, 1);
  EXPECT_EQ(e[2].depth, 3);
  EXPECT_EQ(e[3].tag, "br");
  EXPECT_EQ(e[3].depth, 4);
  EXPECT_EQ(e[4].parent, 1);  // second <p> is a child of body, not of the first <p>
  EXPECT_EQ(e[1].child_count, 2);
}

TEST(TextWords, SkipsScriptAndStyle) {
  const auto w = html::text_words(html::tokenize("<p>a  b</p><style>x{}</style><script>y</script>c"));
  EXPECT_EQ(w, (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Url, ParseLowercasesSchemeAndHost) {
  const auto u = Url::parse("HTTPS://Example.TEST:8080/A/b?q=1#f");
  ASSERT_TRUE(u);
  EXPECT_EQ(u->scheme, "https");
  EXPECT_EQ(u->host, "example.test");
  EXPECT_EQ(u->port, "8080");
  EXPECT_EQ(u->path, "/A/b");
  EXPECT_EQ(u->query, "q=1");
  EXPECT_EQ(u->fragment, "f");
  EXPECT_EQ(u->without_fragment(), "https://example.test:8080/A/b?q=1");
}

TEST(Url, ParseRejectsRelative) {
  EXPECT_FALSE(Url::parse("/a/b"));
  EXPECT_FALSE(Url::parse("x.test/a"));
  EXPECT_FALSE(Url::parse("http://:80/"));
}

TEST(Url, EmptyPathBecomesSlash) { EXPECT_EQ(Url::parse("http://x.test")->path, "/"); }

// Reference resolution examples from the generic URI syntax.
TEST(Url, ResolveReferenceNormalExamples) {
  const auto base = *Url::parse("http://a/b/c/d;p?q");
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"g", "http://a/b/c/g"},           {"./g", "http://a/b/c/g"},
      {"g/", "http://a/b/c/g/"},         {"/g", "http://a/g"},
      {"//g", "http://g/"},              {"?y", "http://a/b/c/d;p?y"},
      {"g?y", "http://a/b/c/g?y"},       {"#s", "http://a/b/c/d;p?q#s"},
      {"g#s", "http://a/b/c/g#s"},       {";x", "http://a/b/c/;x"},
      {"", "http://a/b/c/d;p?q"},        {".", "http://a/b/c/"},
      {"./", "http://a/b/c/"},           {"..", "http://a/b/"},
      {"../", "http://a/b/"},            {"../g", "http://a/b/g"},
      {"../..", "http://a/"},            {"../../", "http://a/"},
      {"../../g", "http://a/g"},         {"../../../g", "http://a/g"},
      {"/./g", "http://a/g"},            {"/../g", "http://a/g"},
      {"g.", "http://a/b/c/g."},         {"g..", "http://a/b/c/g.."},
      {"./../g", "http://a/b/g"},        {"g/../h", "http://a/b/c/h"},
      {"g;x=1/../y", "http://a/b/c/y"},
  };
  for (const auto& [ref, want] : cases) {
    const auto got = resolve_reference(base, ref);
    ASSERT_TRUE(got) << ref;
    EXPECT_EQ(got->to_string(), want) << ref;
  }
}

TEST(Url, ResolveSchemeOnlyReference) {
  const auto base = *Url::parse("https://x.test/a");
  const auto got = resolve_reference(base, "mailto:z@x");
  ASSERT_TRUE(got);
  EXPECT_FALSE(got->is_http());
}

TEST(Url, RemoveDotSegments) {
  EXPECT_EQ(remove_dot_segments("/a/b/c/./../../g"), "/a/g");
  EXPECT_EQ(remove_dot_segments("mid/content=5/../6"), "mid/6");
  EXPECT_EQ(remove_dot_segments("/.."), "/");
}

}  // namespace
}  // namespace grasp
