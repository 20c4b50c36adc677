#include <doctest.h>

#include "fixtures.hpp"
#include "mowa/error.hpp"
#include "mowa/sensors.hpp"

using namespace mowa;

namespace {

MobileAppSpec gps_map() {
  MobileAppSpec s;
  s.name = "Walk";
  s.context_types = {ContextType::location};
  s.sensors = {{"g", SensorKind::gps, ContextType::location, 20}};
  DimensionalSpace space;
  space.kind = SpaceKind::map2d;
  // x = longitude, y = latitude
  // mirrored across the equator, so a reading at (0, 0) is exactly equidistant
  space.pois = {{"p1", "A", {0.0, 0.0001}, "https://a.example/1", 1, {}, {}},
                {"p2", "B", {0.0, -0.0001}, "https://a.example/2", 2, {}, {}}};
  s.space = space;
  return s;
}

std::optional<ContextChange> feed(SensorState& state, const MobileAppSpec& spec, SimEvent ev) {
  auto [next, change] = step(state, spec, ev);
  state = next;
  return change;
}

}  // namespace

TEST_CASE("trace parsing") {
  auto t = parse_trace("{\"t\":0,\"kind\":\"qr\",\"payload\":\"http://en.qrwp.org/Toxodon\"}\n\n"
                       "{\"t\":5,\"kind\":\"scalar\",\"sensor\":\"mic\",\"value\":41.5}\n");
  REQUIRE(t.size() == 2);
  CHECK(t[0].t_ms == 0);
  CHECK(std::get<QrEvent>(t[0].payload).payload == "http://en.qrwp.org/Toxodon");
  CHECK(std::get<ScalarEvent>(t[1].payload).value == 41.5);
  CHECK(parse_trace("").empty());

  try {
    parse_trace("{\"t\":5,\"kind\":\"qr\",\"payload\":\"a\"}\n{\"t\":4,\"kind\":\"qr\",\"payload\":\"b\"}\n");
    FAIL("expected trace.unsorted");
  } catch (const Error& e) {
    CHECK(e.key() == "trace.unsorted");
    CHECK(e.args().at("line") == "2");
  }
  CHECK_THROWS_AS(parse_trace("{\"t\":0,\"kind\":\"sonar\"}\n"), Error);
  CHECK_THROWS_AS(parse_trace("not json\n"), Error);
}

TEST_CASE("event json lines round trip") {
  for (std::string line : {R"({"kind":"nav","t":1,"url":"https://a.example/"})",
                           R"({"kind":"gps","lat":-34.9,"lon":-57.9,"t":2})",
                           R"({"kind":"orientation","alpha":0.0,"beta":10.0,"gamma":60.0,"t":3})",
                           R"({"kind":"clock","minutes":600,"t":4})"}) {
    auto ev = parse_event(line);
    CHECK(parse_event(to_json_line(ev)).t_ms == ev.t_ms);
    CHECK(to_json_line(parse_event(to_json_line(ev))) == to_json_line(ev));
  }
}

TEST_CASE("qr matches the unique PoI with that code") {
  auto spec = fixture::museum_spec();
  CHECK(match_location(QrEvent{"http://en.qrwp.org/Toxodon"}, *spec.space) == "p1");
  CHECK_FALSE(match_location(QrEvent{"http://en.qrwp.org/toxodon"}, *spec.space));
}

TEST_CASE("gps ties break by order, then id") {
  auto spec = gps_map();
  GpsEvent mid{0.0, 0.0};
  CHECK(match_location(mid, *spec.space, spec.sensors[0]) == "p1");
  spec.space->pois[0].order = 3;
  CHECK(match_location(mid, *spec.space, spec.sensors[0]) == "p2");
  spec.space->pois[0].order.reset();
  spec.space->pois[1].order.reset();
  CHECK(match_location(mid, *spec.space, spec.sensors[0]) == "p1");
}

TEST_CASE("gps outside the radius matches nothing") {
  auto spec = gps_map();
  // roughly 500 m east of both
  GpsEvent far{0.0, 0.0045};
  CHECK(haversine_m(far.lat, far.lon, 0.0001, 0.0) > 490);
  CHECK_FALSE(match_location(far, *spec.space, spec.sensors[0]));
}

TEST_CASE("bands are half open") {
  std::vector<Band> bands{{"quiet", "Quiet", 0, 40, "dB"}, {"normal", "Normal", 40, 70, "dB"}};
  CHECK(match_band(40.0, bands) == "normal");
  CHECK(match_band(39.999, bands) == "quiet");
  CHECK_FALSE(match_band(-5.0, bands));
  CHECK_FALSE(match_band(70.0, bands));
}

TEST_CASE("orientation threshold") {
  CHECK(orientation_of({0, 0, 45.0}) == Orientation::portrait);
  CHECK(orientation_of({0, 0, 45.5}) == Orientation::landscape);
  CHECK(orientation_of({0, 0, -80}) == Orientation::landscape);
}

TEST_CASE("step deduplicates repeated readings") {
  auto spec = fixture::museum_spec();
  SensorState st;
  auto a = feed(st, spec, {0, QrEvent{"http://en.qrwp.org/Toxodon"}});
  REQUIRE(a);
  CHECK(a->sensor_id == "qr");
  CHECK(a->value == Semantic{AtPoi{"p1"}});
  CHECK_FALSE(feed(st, spec, {1, QrEvent{"http://en.qrwp.org/Toxodon"}}));
  auto b = feed(st, spec, {2, QrEvent{"http://en.qrwp.org/Glyptodon"}});
  REQUIRE(b);
  CHECK(b->value == Semantic{AtPoi{"p2"}});
  auto left = feed(st, spec, {3, QrEvent{"http://en.qrwp.org/Unknown"}});
  REQUIRE(left);
  CHECK(left->value == Semantic{LeftPois{}});
  CHECK(describe(left->value) == "left");
}

TEST_CASE("a miss before any PoI emits nothing") {
  auto spec = fixture::museum_spec();
  SensorState st;
  CHECK_FALSE(feed(st, spec, {0, QrEvent{"http://en.qrwp.org/Unknown"}}));
}

TEST_CASE("scalar steps follow the dB fixture bands") {
  auto spec = fixture::media_spec();
  SensorState st;
  auto q = feed(st, spec, {0, ScalarEvent{"mic", 30}});
  REQUIRE(q);
  CHECK(describe(q->value) == "band:quiet");
  CHECK_FALSE(feed(st, spec, {1, ScalarEvent{"mic", 35}}));
  auto n = feed(st, spec, {2, ScalarEvent{"mic", 75}});
  REQUIRE(n);
  CHECK(describe(n->value) == "band:noisy");
  // out of range: nothing emitted, band forgotten
  CHECK_FALSE(feed(st, spec, {3, ScalarEvent{"mic", 500}}));
  CHECK(feed(st, spec, {4, ScalarEvent{"mic", 80}}));
}

TEST_CASE("sensor resolution errors") {
  auto spec = fixture::media_spec();
  SensorState st;
  CHECK_THROWS_WITH_AS(step(st, spec, {0, ScalarEvent{"lux", 3}}), doctest::Contains("sensor.unknown"), Error);
  CHECK_THROWS_AS(step(st, spec, {0, QrEvent{"x"}}), Error);
  auto twice = fixture::museum_spec();
  twice.sensors.push_back({"qr2", SensorKind::qr, ContextType::location, 20});
  try {
    step(st, twice, {0, QrEvent{"x"}});
    FAIL("expected sensor.ambiguous");
  } catch (const Error& e) {
    CHECK(e.key() == "sensor.ambiguous");
  }
}

TEST_CASE("gps walk over the floor plan visits every PoI in order") {
  auto spec = fixture::museum_spec();
  auto trace = parse_trace(read_file((fixture::museum_dir() / "traces" / "gps-walk.jsonl").string()));
  SensorState st;
  std::vector<std::string> seen;
  for (const auto& ev : trace) {
    if (auto c = feed(st, spec, ev)) {
      if (auto* at = std::get_if<AtPoi>(&c->value)) seen.push_back(at->poi_id);
    }
  }
  REQUIRE(seen.size() == 12);
  for (size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == "p" + std::to_string(i + 1));
}
