#include <doctest.h>

#include <functional>
#include <set>

#include "fixtures.hpp"
#include "mowa/binding.hpp"
#include "mowa/error.hpp"
#include "mowa/spec_xml.hpp"
#include "mowa/validate.hpp"
#include "mowa/xpath.hpp"

using namespace mowa;

namespace {

std::string error_key(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.key();
  }
  return "";
}

// Brute-force walk for the first element with the given tag and class.
const html::Node* find_first(const html::Node& n, std::string_view tag, std::string_view cls) {
  if (n.kind() == html::NodeKind::element && n.tag() == tag && n.attribute("class") && *n.attribute("class") == cls) {
    return &n;
  }
  for (size_t i = 0; i < n.child_count(); ++i) {
    if (auto* hit = find_first(*n.child(i), tag, cls)) return hit;
  }
  return nullptr;
}

void collect_text(const html::Node& n, std::string& out) {
  if (n.kind() == html::NodeKind::text) out += n.data();
  for (size_t i = 0; i < n.child_count(); ++i) collect_text(*n.child(i), out);
}

std::string squash(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
      space = !out.empty();
    } else {
      if (space) out += ' ';
      space = false;
      out += c;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("museum fixture has 12 PoIs and 11 links") {
  auto spec = fixture::museum_spec();
  REQUIRE(spec.space);
  CHECK(spec.space->pois.size() == 12);
  CHECK(spec.space->links.size() == 11);
  CHECK(spec.poi("p1")->name == "Toxodon");
  CHECK(spec.poi("p12")->name == "Stegomastodon");
  CHECK(validate_spec(spec).ok);
}

TEST_CASE("canonical fixture is a serialization fixed point") {
  std::string golden = read_file(fixture::museum_spec_path());
  CHECK(serialize_spec(parse_spec(golden)) == golden);
  std::string source = read_file((fixture::museum_dir() / "source.mowa.xml").string());
  CHECK(serialize_spec(parse_spec(source)) == golden);

  std::string media = read_file(fixture::media_spec_path());
  CHECK(serialize_spec(parse_spec(media)) == media);
}

TEST_CASE("minimal spec parses with defaults") {
  auto spec = parse_spec("<mowa-app name=\"M\"/>");
  CHECK(spec.name == "M");
  CHECK(spec.version == 1);
  CHECK(spec.locale == "en");
  CHECK(spec.layers.empty());
  CHECK(spec.rules.empty());
  CHECK(validate_spec(spec).ok);
  auto text = serialize_spec_unchecked(spec);
  size_t roots = 0;
  for (size_t at = text.find("<mowa-app"); at != std::string::npos; at = text.find("<mowa-app", at + 1)) ++roots;
  CHECK(roots == 1);
}

TEST_CASE("gps radius defaults to 20 m") {
  auto spec = parse_spec(
      "<mowa-app name=\"M\"><context-types><context-type kind=\"location\"/></context-types>"
      "<sensors><sensor id=\"g\" kind=\"gps\"/></sensors></mowa-app>");
  CHECK(spec.sensors.at(0).radius_m == 20.0);
  CHECK(spec.sensors.at(0).context_type == ContextType::location);
}

TEST_CASE("rule naming an absent sensor is a dangling reference") {
  try {
    parse_spec(
        "<mowa-app name=\"M\"><layers><layer id=\"l\" target=\"pattern\" value=\"*\"/></layers>"
        "<rules><rule sensor=\"sX\" layer=\"l\"/></rules></mowa-app>");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.key() == "spec.dangling-reference");
    CHECK(e.args().at("id") == "sX");
  }
}

TEST_CASE("attributes come out sorted") {
  auto spec = parse_spec("<mowa-app version=\"1\" ns=\"org.example.a\" name=\"M\" filename=\"m\"/>");
  auto text = serialize_spec_unchecked(spec);
  CHECK(text.find("<mowa-app filename=\"m\" locale=\"en\" name=\"M\" ns=\"org.example.a\" version=\"1\"") !=
        std::string::npos);
}

TEST_CASE("parse errors carry their keys") {
  CHECK(error_key([] { parse_spec("<mowa-app name=\"x\">"); }) == "xml.syntax");
  CHECK(error_key([] { parse_spec("<app/>"); }) == "spec.schema-violation");
  CHECK(error_key([] { parse_spec("<mowa-app name=\"x\"><gadgets/></mowa-app>"); }) == "spec.schema-violation");
  CHECK(error_key([] { parse_spec("<mowa-app name=\"x\" colour=\"red\"/>"); }) == "spec.schema-violation");
}

TEST_CASE("serialize refuses an invalid spec") {
  auto spec = fixture::museum_spec();
  spec.name.clear();
  CHECK(error_key([&] { serialize_spec(spec); }) == "spec.invalid");
}

TEST_CASE("validation flags broken invariants") {
  auto media = fixture::media_spec();
  media.space->bands[1].min = 50;
  media.space->bands[1].max = 50;
  auto r = validate_spec(media);
  CHECK_FALSE(r.ok);
  CHECK(r.has("band.empty-range"));

  auto overlap = fixture::media_spec();
  overlap.space->bands[1].min = 30;
  CHECK(validate_spec(overlap).has("band.overlap"));

  auto spec = fixture::museum_spec();
  spec.space->pois[3].order = 3;
  CHECK(validate_spec(spec).has("poi.duplicate-order"));

  auto oob = fixture::museum_spec();
  oob.space->pois[0].position.x = 41;
  CHECK(validate_spec(oob).has("poi.out-of-bounds"));

  auto code = fixture::museum_spec();
  code.space->pois[1].code = code.space->pois[0].code;
  CHECK(validate_spec(code).has("poi.duplicate-code"));

  auto version = fixture::museum_spec();
  version.version = 2;
  CHECK(validate_spec(version).has("app.version-unsupported"));

  auto sensor = fixture::museum_spec();
  sensor.sensors.push_back({"mic", SensorKind::db, ContextType::noise, kDefaultGpsRadiusM});
  CHECK(validate_spec(sensor).has("sensor.context-type-unselected"));

  auto two_roots = fixture::museum_spec();
  two_roots.space->links.erase(two_roots.space->links.begin() + 5);
  CHECK(validate_spec(two_roots).has("links.not-a-chain"));
}

TEST_CASE("validation warnings do not fail the report") {
  auto spec = fixture::museum_spec();
  spec.space->pois[4].order.reset();
  auto r = validate_spec(spec);
  CHECK(r.ok);
  CHECK(r.has("poi.order-missing"));

  std::set<std::string> known{"https://elsewhere.example/"};
  ValidationOptions o;
  o.known_urls = &known;
  auto r2 = validate_spec(fixture::museum_spec(), o);
  CHECK(r2.ok);
  CHECK(r2.has("prop.extract-url-unknown"));
  CHECK(r2.error_count() == 0);
}

TEST_CASE("validate is pure") {
  auto spec = fixture::museum_spec();
  spec.space->bands.push_back({"b", "B", 1, 1, "dB"});
  auto a = validate_spec(spec);
  auto b = validate_spec(spec);
  REQUIRE(a.issues.size() == b.issues.size());
  for (size_t i = 0; i < a.issues.size(); ++i) {
    CHECK(a.issues[i].key == b.issues[i].key);
    CHECK(a.issues[i].path == b.issues[i].path);
  }
}

TEST_CASE("stage validation is scoped") {
  MobileAppSpec spec;
  spec.name = "Tour";
  spec.ns = "org.example.tour";
  spec.filename = "tour";
  CHECK(validate_stage(spec, Stage::base_data).ok);
  CHECK_FALSE(validate_stage(spec, Stage::context_types).ok);
  spec.context_types.insert(ContextType::location);
  CHECK(validate_stage(spec, Stage::context_types).ok);
  CHECK(validate_stage(spec, Stage::sensors).has("sensors.empty"));
}

TEST_CASE("bind expressions round trip") {
  for (std::string expr : {"poi.name", "poi.target_url", "poi.code", "poi.prop:poi-desc",
                           "extract:https://a.example/x#//p[1]#text"}) {
    auto b = parse_bind_expression(expr, "");
    REQUIRE(b);
    CHECK(bind_expression(*b) == expr);
  }
  auto lit = parse_bind_expression("", "Hello");
  REQUIRE(lit);
  CHECK(std::get<LiteralValue>(*lit).value == "Hello");
  CHECK_FALSE(parse_bind_expression("poi.colour", ""));
}

TEST_CASE("bindings resolve against the fixture") {
  auto spec = fixture::museum_spec();
  fixture::NetworkTripwire wire;
  auto cache = fixture::museum_cache(wire.fetcher());
  const auto* p1 = spec.poi("p1");

  CHECK(resolve_binding(spec, LiteralValue{"Hello"}, nullptr, &cache) == "Hello");
  CHECK(resolve_binding(spec, PoiFieldRef{PoiField::name}, p1, &cache) == "Toxodon");
  CHECK(resolve_binding(spec, PoiFieldRef{PoiField::code}, p1, &cache) == "http://en.qrwp.org/Toxodon");

  auto page = cache.document("https://museo.fcnym.unlp.edu.ar/beagle/toxodon.html");
  REQUIRE(page);
  const html::Node* desc = find_first(page->root(), "p", "piece-desc");
  REQUIRE(desc);
  std::string expected;
  collect_text(*desc, expected);
  CHECK(resolve_binding(spec, PoiPropRef{"poi-desc"}, p1, &cache) == squash(expected));

  const html::Node* img = find_first(page->root(), "img", "piece");
  REQUIRE(img);
  CHECK(resolve_binding(spec, PoiPropRef{"poi-pic"}, p1, &cache) == *img->attribute("src"));
  CHECK(wire.calls == 0);
}

TEST_CASE("binding errors") {
  auto spec = fixture::museum_spec();
  auto cache = fixture::museum_cache();
  CHECK(error_key([&] { resolve_binding(spec, PoiFieldRef{PoiField::name}, nullptr, &cache); }) ==
        "binding.missing-poi");
  CHECK(error_key([&] { resolve_binding(spec, PoiPropRef{"poi-age"}, spec.poi("p1"), &cache); }) ==
        "binding.unknown-prop");
  ExtractSource missing{"https://museo.fcnym.unlp.edu.ar/beagle/nothing.html", "//p", ExtractMode{}};
  CHECK(error_key([&] { resolve_binding(spec, missing, nullptr, &cache); }) == "binding.extraction-failed");
}
