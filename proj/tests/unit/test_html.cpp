#include <doctest.h>

#include "mowa/error.hpp"
#include "mowa/html.hpp"

using namespace mowa;
using html::Node;

TEST_CASE("serialize of a plain document is the identity") {
  const char* src = "<!DOCTYPE html><html lang=\"en\"><head><title>A &lt; B</title></head>"
                    "<body><p class=\"x\">one<br>two</p><img src=\"a.png\" alt=\"\"></body></html>";
  auto doc = html::parse(src);
  CHECK(html::serialize(doc) == src);
}

TEST_CASE("missing html wrapper is synthesized") {
  auto doc = html::parse("<p>hi</p>");
  CHECK(doc.root().tag() == "html");
  CHECK(html::serialize(doc) == "<html><p>hi</p></html>");
  CHECK_FALSE(doc.doctype());
}

TEST_CASE("entities decode and re-escape minimally") {
  auto doc = html::parse("<p title=\"&quot;q&quot;\">&lt;a&gt; &#65;&#x42; &copy; 3 & 4</p>");
  const Node* p = doc.root().child(0);
  CHECK(p->child(0)->data() == "<a> AB &copy; 3 & 4");
  CHECK(*p->attribute("title") == "\"q\"");
  auto again = html::parse(html::serialize(doc));
  CHECK(html::equivalent(doc, again));
}

TEST_CASE("raw text elements keep markup verbatim") {
  const char* src = "<html><head><script>if (a < b && c) { x = '</p>'; }</script>"
                    "<style>p > a { }</style></head></html>";
  auto doc = html::parse(src);
  const Node* script = doc.root().child(0)->child(0);
  CHECK(script->tag() == "script");
  CHECK(script->child(0)->data() == "if (a < b && c) { x = '</p>'; }");
  CHECK(html::serialize(doc) == src);
}

TEST_CASE("implied end tags") {
  SUBCASE("paragraphs") {
    auto doc = html::parse("<div><p>a<p>b</div>");
    CHECK(html::serialize(doc) == "<html><div><p>a</p><p>b</p></div></html>");
  }
  SUBCASE("list items") {
    auto doc = html::parse("<ul><li>a<li>b</ul>");
    CHECK(html::serialize(doc) == "<html><ul><li>a</li><li>b</li></ul></html>");
  }
  SUBCASE("table cells and rows") {
    auto doc = html::parse("<table><tr><td>1<td>2<tr><td>3</table>");
    CHECK(html::serialize(doc) == "<html><table><tr><td>1</td><td>2</td></tr><tr><td>3</td></tr></table></html>");
  }
  SUBCASE("stray end tag is dropped") {
    auto doc = html::parse("<div>a</span>b</div>");
    CHECK(html::serialize(doc) == "<html><div>ab</div></html>");
  }
  SUBCASE("unclosed elements close at end of input") {
    auto doc = html::parse("<div><span>a");
    CHECK(html::serialize(doc) == "<html><div><span>a</span></div></html>");
  }
}

TEST_CASE("lenient attribute forms") {
  auto doc = html::parse("<input type=checkbox checked data-a='1' data-a=\"2\">");
  const Node* in = doc.root().child(0);
  CHECK(*in->attribute("type") == "checkbox");
  CHECK(*in->attribute("checked") == "");
  CHECK(*in->attribute("data-a") == "1");
}

TEST_CASE("comments survive a round trip") {
  const char* src = "<html><body><!-- note --><p>x</p></body></html>";
  CHECK(html::serialize(html::parse(src)) == src);
}

TEST_CASE("fragment insertion positions") {
  const char* src = "<html><body><div id=\"t\"><em>old</em></div></body></html>";
  auto make = [] {
    std::vector<std::unique_ptr<Node>> nodes;
    auto b = Node::element("b");
    b->append_child(Node::text("new"));
    nodes.push_back(std::move(b));
    return html::make_fragment("L", "text-injector", std::move(nodes));
  };
  const std::string mark = " data-mowa-layer=\"L\" data-mowa-kind=\"text-injector\"";
  auto check = [&](html::Position pos, std::string expected_body) {
    auto doc = html::parse(src);
    Node* div = doc.root().child(0)->child(0);
    html::insert_fragment(doc, *div, pos, make());
    CHECK(html::serialize(doc) == "<html><body>" + expected_body + "</body></html>");
  };
  check(html::Position::before, "<b" + mark + ">new</b><div id=\"t\"><em>old</em></div>");
  check(html::Position::after, "<div id=\"t\"><em>old</em></div><b" + mark + ">new</b>");
  check(html::Position::first_child, "<div id=\"t\"><b" + mark + ">new</b><em>old</em></div>");
  check(html::Position::last_child, "<div id=\"t\"><em>old</em><b" + mark + ">new</b></div>");
  check(html::Position::replace_children, "<div id=\"t\"><b" + mark + ">new</b></div>");
}

TEST_CASE("fragment markers and stripping") {
  auto doc = html::parse("<html><body><p>x</p></body></html>");
  auto original = doc;
  std::vector<std::unique_ptr<Node>> nodes;
  nodes.push_back(Node::element("span"));
  auto frag = html::make_fragment("tour", "scalar-badge", std::move(nodes));
  CHECK(frag.well_marked());
  Node* p = doc.root().child(0)->child(0);
  html::insert_fragment(doc, *p, html::Position::after, frag);
  p->set_attribute("data-mowa-volume", "0.5");
  p->set_attribute(html::kEditAttr, "tour");
  CHECK_FALSE(html::equivalent(doc, original));

  auto other = doc;
  html::strip_augmentations(other, "elsewhere");
  CHECK(html::equivalent(other, doc));

  html::strip_augmentations(doc, "tour");
  CHECK(html::equivalent(doc, original));
  CHECK(html::serialize(doc) == html::serialize(original));
}

TEST_CASE("insertion errors") {
  auto doc = html::parse("<html><body><img src=\"a\"></body></html>");
  auto frag = html::make_fragment("L", "k", {});
  Node* img = doc.root().child(0)->child(0);
  CHECK_THROWS_WITH_AS(html::insert_fragment(doc, *img, html::Position::first_child, frag), "html.void-target (tag=img)",
                       Error);
  auto stray = Node::element("div");
  try {
    html::insert_fragment(doc, *stray, html::Position::after, frag);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.key() == "html.detached-anchor");
  }
}

TEST_CASE("position names") {
  for (auto p : {html::Position::before, html::Position::after, html::Position::first_child,
                 html::Position::last_child, html::Position::replace_children}) {
    CHECK(html::position_from_string(html::to_string(p)) == p);
  }
  CHECK_FALSE(html::position_from_string("inside"));
}

TEST_CASE("document copies are deep") {
  auto doc = html::parse("<p>a</p>");
  auto copy = doc;
  copy.root().child(0)->set_attribute("id", "z");
  CHECK(doc.root().child(0)->attribute("id") == nullptr);
  CHECK(copy.owns(copy.root().child(0)));
  CHECK_FALSE(doc.owns(copy.root().child(0)));
}
