#include "mowa/spec.hpp"

#include <algorithm>
#include <array>

namespace mowa {
namespace {

template <typename E, size_t N>
std::optional<E> lookup(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view s) {
  for (const auto& [e, name] : table) {
    if (name == s) return e;
  }
  return std::nullopt;
}

template <typename E, size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E e) {
  for (const auto& [v, name] : table) {
    if (v == e) return name;
  }
  return "?";
}

constexpr std::array<std::pair<ContextType, std::string_view>, 5> kContextTypes = {{
    {ContextType::location, "location"},
    {ContextType::orientation, "orientation"},
    {ContextType::light, "light"},
    {ContextType::noise, "noise"},
    {ContextType::time, "time"},
}};

constexpr std::array<std::pair<SensorKind, std::string_view>, 6> kSensorKinds = {{
    {SensorKind::gps, "gps"},
    {SensorKind::qr, "qr"},
    {SensorKind::lux, "lux"},
    {SensorKind::db, "db"},
    {SensorKind::orientation, "orientation"},
    {SensorKind::clock, "clock"},
}};

constexpr std::array<std::pair<SpaceKind, std::string_view>, 5> kSpaceKinds = {{
    {SpaceKind::map2d, "map2d"},
    {SpaceKind::floorplan, "floorplan"},
    {SpaceKind::scalar_scale, "scalar_scale"},
    {SpaceKind::angle_scale, "angle_scale"},
    {SpaceKind::time_scale, "time_scale"},
}};

constexpr std::array<std::pair<PoiField, std::string_view>, 3> kPoiFields = {{
    {PoiField::name, "name"},
    {PoiField::target_url, "target_url"},
    {PoiField::code, "code"},
}};

template <typename T>
const T* find_by_id(const std::vector<T>& items, std::string_view id) {
  auto it = std::find_if(items.begin(), items.end(), [&](const T& t) { return t.id == id; });
  return it == items.end() ? nullptr : &*it;
}

}  // namespace

std::string_view to_string(ContextType t) { return name_of(kContextTypes, t); }
std::string_view to_string(SensorKind k) { return name_of(kSensorKinds, k); }
std::string_view to_string(SpaceKind k) { return name_of(kSpaceKinds, k); }
std::string_view to_string(PoiField f) { return name_of(kPoiFields, f); }

std::optional<ContextType> context_type_from_string(std::string_view s) { return lookup(kContextTypes, s); }
std::optional<SensorKind> sensor_kind_from_string(std::string_view s) { return lookup(kSensorKinds, s); }
std::optional<SpaceKind> space_kind_from_string(std::string_view s) { return lookup(kSpaceKinds, s); }

ContextType context_type_of(SensorKind k) {
  switch (k) {
    case SensorKind::gps:
    case SensorKind::qr: return ContextType::location;
    case SensorKind::lux: return ContextType::light;
    case SensorKind::db: return ContextType::noise;
    case SensorKind::orientation: return ContextType::orientation;
    case SensorKind::clock: return ContextType::time;
  }
  return ContextType::location;
}

bool is_location_space(SpaceKind k) { return k == SpaceKind::map2d || k == SpaceKind::floorplan; }

std::optional<ExtractMode> ExtractMode::parse(std::string_view s) {
  if (s == "text") return ExtractMode{};
  if (s.starts_with("attr:") && s.size() > 5) return ExtractMode{std::string(s.substr(5))};
  return std::nullopt;
}

const Property* PointOfInterest::prop(std::string_view prop_name) const {
  auto it = std::find_if(props.begin(), props.end(), [&](const Property& p) { return p.name == prop_name; });
  return it == props.end() ? nullptr : &*it;
}

const PointOfInterest* DimensionalSpace::poi(std::string_view id) const { return find_by_id(pois, id); }
const Band* DimensionalSpace::band(std::string_view id) const { return find_by_id(bands, id); }

const Binding* AugmenterInstance::param(std::string_view param_name) const {
  for (const auto& [n, b] : params) {
    if (n == param_name) return &b;
  }
  return nullptr;
}

const SensorDecl* MobileAppSpec::sensor(std::string_view id) const { return find_by_id(sensors, id); }
const Layer* MobileAppSpec::layer(std::string_view id) const { return find_by_id(layers, id); }
const PointOfInterest* MobileAppSpec::poi(std::string_view id) const {
  return space ? space->poi(id) : nullptr;
}

std::string bind_expression(const Binding& b) {
  struct Visitor {
    std::string operator()(const LiteralValue&) const { return {}; }
    std::string operator()(const PoiFieldRef& f) const { return "poi." + std::string(to_string(f.field)); }
    std::string operator()(const PoiPropRef& p) const { return "poi.prop:" + p.name; }
    std::string operator()(const ExtractSource& e) const {
      return "extract:" + e.url + "#" + e.xpath + "#" + e.mode.str();
    }
  };
  return std::visit(Visitor{}, b);
}

std::optional<Binding> parse_bind_expression(std::string_view bind, std::string value) {
  if (bind.empty()) return Binding{LiteralValue{std::move(value)}};
  if (bind.starts_with("poi.prop:")) {
    std::string_view name = bind.substr(9);
    if (name.empty()) return std::nullopt;
    return Binding{PoiPropRef{std::string(name)}};
  }
  if (bind.starts_with("poi.")) {
    auto field = lookup(kPoiFields, bind.substr(4));
    if (!field) return std::nullopt;
    return Binding{PoiFieldRef{*field}};
  }
  if (bind.starts_with("extract:")) {
    std::string_view body = bind.substr(8);
    auto first = body.find('#');
    auto last = body.rfind('#');
    if (first == std::string_view::npos || first == last) return std::nullopt;
    auto mode = ExtractMode::parse(body.substr(last + 1));
    if (!mode) return std::nullopt;
    return Binding{ExtractSource{std::string(body.substr(0, first)),
                                 std::string(body.substr(first + 1, last - first - 1)), *mode}};
  }
  return std::nullopt;
}

}  // namespace mowa
