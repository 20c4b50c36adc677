#include "mowa/sensors.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "mowa/error.hpp"

namespace mowa {
namespace {

using nlohmann::json;

Error syntax(size_t line, std::string detail) {
  return Error("trace.syntax", {{"line", std::to_string(line)}, {"detail", std::move(detail)}});
}

double number(const json& j, const char* key, size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) throw syntax(line, std::string("missing number '") + key + "'");
  double v = it->get<double>();
  if (!std::isfinite(v)) throw syntax(line, std::string("non-finite '") + key + "'");
  return v;
}

std::string text(const json& j, const char* key, size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw syntax(line, std::string("missing string '") + key + "'");
  return it->get<std::string>();
}

SimEvent event_from(const json& j, size_t line, bool require_t) {
  if (!j.is_object()) throw syntax(line, "expected an object");
  SimEvent ev;
  auto t = j.find("t");
  if (t != j.end()) {
    if (!t->is_number_integer() || t->get<int64_t>() < 0) throw syntax(line, "'t' must be a non-negative integer");
    ev.t_ms = t->get<int64_t>();
  } else if (require_t) {
    throw syntax(line, "missing 't'");
  }
  std::string kind = text(j, "kind", line);
  if (kind == "nav") {
    ev.payload = NavEvent{text(j, "url", line)};
  } else if (kind == "gps") {
    ev.payload = GpsEvent{number(j, "lat", line), number(j, "lon", line)};
  } else if (kind == "qr") {
    ev.payload = QrEvent{text(j, "payload", line)};
  } else if (kind == "scalar") {
    ev.payload = ScalarEvent{text(j, "sensor", line), number(j, "value", line)};
  } else if (kind == "orientation") {
    ev.payload = OrientationEvent{number(j, "alpha", line), number(j, "beta", line), number(j, "gamma", line)};
  } else if (kind == "clock") {
    auto it = j.find("minutes");
    if (it == j.end() || !it->is_number_integer()) throw syntax(line, "missing integer 'minutes'");
    int m = it->get<int>();
    if (m < 0 || m >= 24 * 60) throw syntax(line, "'minutes' outside the day");
    ev.payload = ClockEvent{m};
  } else {
    throw syntax(line, "unknown kind '" + kind + "'");
  }
  return ev;
}

const SensorDecl* unique_of_kind(const MobileAppSpec& spec, SensorKind kind) {
  const SensorDecl* found = nullptr;
  for (const auto& s : spec.sensors) {
    if (s.kind != kind) continue;
    if (found) throw Error("sensor.ambiguous", {{"kind", std::string(to_string(kind))}});
    found = &s;
  }
  if (!found) throw Error("sensor.unknown", {{"id", std::string(to_string(kind))}});
  return found;
}

}  // namespace

std::vector<SimEvent> parse_trace(std::string_view jsonl) {
  std::vector<SimEvent> out;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < jsonl.size()) {
    size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw syntax(line_no, "malformed JSON");
    SimEvent ev = event_from(j, line_no, true);
    if (!out.empty() && ev.t_ms < out.back().t_ms) throw Error("trace.unsorted", {{"line", std::to_string(line_no)}});
    out.push_back(std::move(ev));
  }
  return out;
}

SimEvent parse_event(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw syntax(1, "malformed JSON");
  return event_from(j, 1, false);
}

std::string to_json_line(const SimEvent& ev) {
  json j;
  j["t"] = ev.t_ms;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, NavEvent>) {
          j["kind"] = "nav";
          j["url"] = p.url;
        } else if constexpr (std::is_same_v<T, GpsEvent>) {
          j["kind"] = "gps";
          j["lat"] = p.lat;
          j["lon"] = p.lon;
        } else if constexpr (std::is_same_v<T, QrEvent>) {
          j["kind"] = "qr";
          j["payload"] = p.payload;
        } else if constexpr (std::is_same_v<T, ScalarEvent>) {
          j["kind"] = "scalar";
          j["sensor"] = p.sensor_id;
          j["value"] = p.value;
        } else if constexpr (std::is_same_v<T, OrientationEvent>) {
          j["kind"] = "orientation";
          j["alpha"] = p.alpha;
          j["beta"] = p.beta;
          j["gamma"] = p.gamma;
        } else {
          j["kind"] = "clock";
          j["minutes"] = p.minutes;
        }
      },
      ev.payload);
  return j.dump();
}

std::string_view to_string(Orientation o) { return o == Orientation::landscape ? "landscape" : "portrait"; }

std::string describe(const Semantic& s) {
  if (auto* a = std::get_if<AtPoi>(&s)) return "at:" + a->poi_id;
  if (std::holds_alternative<LeftPois>(s)) return "left";
  if (auto* b = std::get_if<InBand>(&s)) return "band:" + b->band_id;
  return "orientation:" + std::string(to_string(std::get<OrientationMode>(s).mode));
}

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kRad = M_PI / 180.0;
  double s1 = std::sin((lat2 - lat1) * kRad / 2);
  double s2 = std::sin((lon2 - lon1) * kRad / 2);
  double a = s1 * s1 + std::cos(lat1 * kRad) * std::cos(lat2 * kRad) * s2 * s2;
  return 2 * kEarthRadiusM * std::atan2(std::sqrt(a), std::sqrt(std::max(0.0, 1 - a)));
}

std::optional<std::string> match_location(const QrEvent& reading, const DimensionalSpace& space) {
  std::optional<std::string> hit;
  for (const auto& p : space.pois) {
    if (p.code && *p.code == reading.payload) {
      if (hit) return std::nullopt;  // not unique
      hit = p.id;
    }
  }
  return hit;
}

std::optional<std::string> match_location(const GpsEvent& reading, const DimensionalSpace& space,
                                          const SensorDecl& sensor) {
  const PointOfInterest* best = nullptr;
  double best_d = 0;
  auto rank = [](const PointOfInterest& p) { return p.order.value_or(std::numeric_limits<int>::max()); };
  for (const auto& p : space.pois) {
    double d = space.kind == SpaceKind::map2d ? haversine_m(reading.lat, reading.lon, p.position.y, p.position.x)
                                              : std::hypot(p.position.x - reading.lon, p.position.y - reading.lat);
    if (!(d <= sensor.radius_m)) continue;
    if (!best || d < best_d || (d == best_d && std::make_pair(rank(p), p.id) < std::make_pair(rank(*best), best->id))) {
      best = &p;
      best_d = d;
    }
  }
  if (!best) return std::nullopt;
  return best->id;
}

std::optional<std::string> match_band(double value, const std::vector<Band>& bands) {
  for (const auto& b : bands) {
    if (b.min <= value && value < b.max) return b.id;
  }
  return std::nullopt;
}

Orientation orientation_of(const OrientationEvent& ev) {
  return std::abs(ev.gamma) > kLandscapeGammaDeg ? Orientation::landscape : Orientation::portrait;
}

const SensorDecl* sensor_for(const MobileAppSpec& spec, const SimPayload& payload) {
  return std::visit(
      [&](const auto& p) -> const SensorDecl* {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, NavEvent>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, GpsEvent>) {
          return unique_of_kind(spec, SensorKind::gps);
        } else if constexpr (std::is_same_v<T, QrEvent>) {
          return unique_of_kind(spec, SensorKind::qr);
        } else if constexpr (std::is_same_v<T, ScalarEvent>) {
          const SensorDecl* s = spec.sensor(p.sensor_id);
          if (!s) throw Error("sensor.unknown", {{"id", p.sensor_id}});
          return s;
        } else if constexpr (std::is_same_v<T, OrientationEvent>) {
          return unique_of_kind(spec, SensorKind::orientation);
        } else {
          return unique_of_kind(spec, SensorKind::clock);
        }
      },
      payload);
}

std::pair<SensorState, std::optional<ContextChange>> step(const SensorState& state, const MobileAppSpec& spec,
                                                          const SimEvent& ev) {
  const SensorDecl* sensor = sensor_for(spec, ev.payload);
  if (!sensor) return {state, std::nullopt};

  static const DimensionalSpace kEmpty;
  const DimensionalSpace& space = spec.space ? *spec.space : kEmpty;
  const Semantic* previous = nullptr;
  if (auto it = state.last.find(sensor->id); it != state.last.end()) previous = &it->second;

  std::optional<Semantic> now;
  bool forget = false;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GpsEvent> || std::is_same_v<T, QrEvent>) {
          std::optional<std::string> poi;
          if constexpr (std::is_same_v<T, GpsEvent>) {
            poi = match_location(p, space, *sensor);
          } else {
            poi = match_location(p, space);
          }
          if (poi) {
            now = AtPoi{*poi};
          } else if (previous) {
            now = LeftPois{};
          }
        } else if constexpr (std::is_same_v<T, ScalarEvent>) {
          if (auto b = match_band(p.value, space.bands)) now = InBand{*b};
          else forget = true;
        } else if constexpr (std::is_same_v<T, ClockEvent>) {
          if (auto b = match_band(p.minutes, space.bands)) now = InBand{*b};
          else forget = true;
        } else if constexpr (std::is_same_v<T, OrientationEvent>) {
          now = OrientationMode{orientation_of(p)};
        }
      },
      ev.payload);

  SensorState next = state;
  if (forget) next.last.erase(sensor->id);
  if (!now || (previous && *previous == *now)) return {std::move(next), std::nullopt};
  next.last[sensor->id] = *now;
  return {std::move(next), ContextChange{sensor->id, ev.t_ms, *now}};
}

}  // namespace mowa
