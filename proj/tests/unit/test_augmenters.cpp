#include <doctest.h>

#include "fixtures.hpp"
#include "mowa/augmenters.hpp"
#include "mowa/error.hpp"
#include "mowa/html.hpp"
#include "mowa/tour.hpp"

using namespace mowa;
using namespace mowa::augmenters;

namespace {

std::vector<std::string> ids(const std::vector<const AugmenterKind*>& kinds) {
  std::vector<std::string> out;
  for (auto* k : kinds) out.push_back(k->id);
  return out;
}

std::string render_nav(const TourState& tour) {
  RenderInput in;
  in.layer_id = "tour";
  in.tour = &tour;
  auto r = render(*find_kind(kHypermediaNav), in);
  std::string out;
  for (const auto& n : r.fragment.nodes) out += html::serialize(*n);
  return out;
}

}  // namespace

TEST_CASE("catalog lists the five built-in kinds") {
  const auto& cat = catalog();
  std::vector<std::string> names;
  for (const auto& k : cat) {
    names.push_back(k.id);
    CHECK_FALSE(k.compatible_context_types.empty());
  }
  CHECK(names == std::vector<std::string>{"poi-info-panel", "hypermedia-nav", "scalar-badge", "media-volume-adapter",
                                          "text-injector"});
  CHECK(find_kind("hypermedia-nav")->renders_tour_state);
  CHECK(&catalog() == &cat);
}

TEST_CASE("suggest filters by context type in catalog order") {
  CHECK(ids(suggest({ContextType::location})) ==
        std::vector<std::string>{"poi-info-panel", "hypermedia-nav", "text-injector"});
  CHECK(ids(suggest({ContextType::noise})) ==
        std::vector<std::string>{"scalar-badge", "media-volume-adapter", "text-injector"});
  CHECK(suggest({}).empty());
}

TEST_CASE("nav names the next piece while on track") {
  auto spec = fixture::museum_spec();
  auto tour = start_tour(spec);
  tour.sense("p1");
  auto html = render_nav(tour);
  CHECK(html.find("data-mowa-walk=\"p2\"") != std::string::npos);
  CHECK(html.find(">Glyptodon<") != std::string::npos);
}

TEST_CASE("nav names the expected piece on a wrong piece") {
  auto spec = fixture::museum_spec();
  auto tour = start_tour(spec);
  tour.sense("p3");
  CHECK(tour.mode == TourMode::wrong_piece);
  auto html = render_nav(tour);
  CHECK(html.find("data-mowa-poi=\"p1\"") != std::string::npos);
  CHECK(html.find("data-mowa-walk") == std::string::npos);
  CHECK(html.find("Megatherium") == std::string::npos);
}

TEST_CASE("nav without tour state is an error") {
  RenderInput in;
  in.layer_id = "tour";
  CHECK_THROWS_WITH_AS(render(*find_kind(kHypermediaNav), in), doctest::Contains("augmenter.tour-missing"), Error);
  CHECK_THROWS_WITH_AS(render(*find_kind(kTextInjector), in), doctest::Contains("augmenter.param-missing"), Error);
}

TEST_CASE("volume adapter maps the active band") {
  RenderInput in;
  in.layer_id = "volume";
  in.band = ActiveBand{"noisy", "Noisy"};
  in.params = {{"media-xpath", "//video"}, {"volume:noisy", "0.9"}, {"volume:quiet", "0.3"}};
  auto r = render(*find_kind(kMediaVolumeAdapter), in);
  REQUIRE(r.edits.size() == 2);
  CHECK(r.edits[0].xpath == "//video");
  CHECK(r.edits[0].name == "data-mowa-volume");
  CHECK(r.edits[0].value == "0.9");
}

TEST_CASE("apply_layer on a museum page") {
  auto spec = fixture::museum_spec();
  auto cache = fixture::museum_cache();
  auto tour = start_tour(spec);
  tour.sense("p1");
  auto page = fixture::museum_corpus().page("https://en.wikipedia.org/wiki/Toxodon");
  REQUIRE(page);
  BindingContext ctx{&spec, spec.poi("p1"), std::nullopt, &tour, &cache};
  auto once = apply_layer(*page, *spec.layer("tour"), ctx);
  CHECK(once.augmenters_applied == 2);
  CHECK(once.warnings.empty());
  auto text = html::serialize(once.doc);
  CHECK(text.find("Skull of Toxodon platensis") != std::string::npos);
  CHECK(text.find("img/toxodon.jpg") != std::string::npos);

  auto twice = apply_layer(once.doc, *spec.layer("tour"), ctx);
  CHECK(html::serialize(twice.doc) == text);

  html::Document stripped = once.doc;
  html::strip_augmentations(stripped);
  CHECK(html::equivalent(stripped, *page, true));
}

TEST_CASE("an anchor miss is a warning") {
  auto spec = fixture::museum_spec();
  Layer layer{"l", {LayerTarget::Kind::pattern, "*"}, {{"text-injector", "/html/body/nav", "after", {}}}};
  layer.augmenters[0].params.emplace_back("text", LiteralValue{"hi"});
  auto page = html::parse("<html><body><p>x</p></body></html>");
  auto r = apply_layer(page, layer, {&spec, nullptr, std::nullopt, nullptr, nullptr});
  CHECK(r.augmenters_applied == 0);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].key == "anchor.miss");
  CHECK(html::serialize(r.doc) == html::serialize(page));
}

TEST_CASE("a binding error leaves the page untouched") {
  auto spec = fixture::museum_spec();
  auto page = html::parse("<html><body><h1 id=\"firstHeading\">x</h1><div id=\"mw-content-text\"></div></body></html>");
  // no PoI in context
  CHECK_THROWS_AS(apply_layer(page, *spec.layer("tour"), {&spec, nullptr, std::nullopt, nullptr, nullptr}), Error);
}
