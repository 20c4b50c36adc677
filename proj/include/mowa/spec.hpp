#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mowa {

enum class ContextType { location, orientation, light, noise, time };
enum class SensorKind { gps, qr, lux, db, orientation, clock };
enum class SpaceKind { map2d, floorplan, scalar_scale, angle_scale, time_scale };

std::string_view to_string(ContextType t);
std::string_view to_string(SensorKind k);
std::string_view to_string(SpaceKind k);
std::optional<ContextType> context_type_from_string(std::string_view s);
std::optional<SensorKind> sensor_kind_from_string(std::string_view s);
std::optional<SpaceKind> space_kind_from_string(std::string_view s);

// Fixed pairing: gps,qr -> location; lux -> light; db -> noise; ...
ContextType context_type_of(SensorKind k);
bool is_location_space(SpaceKind k);

inline constexpr double kDefaultGpsRadiusM = 20.0;

struct SensorDecl {
  std::string id;
  SensorKind kind = SensorKind::qr;
  ContextType context_type = ContextType::location;
  // Match radius; meaningful for gps sensors only.
  double radius_m = kDefaultGpsRadiusM;
  bool operator==(const SensorDecl&) const = default;
};

struct PointInSpace {
  double x = 0;
  double y = 0;
  std::optional<double> z;
  bool operator==(const PointInSpace&) const = default;
};

struct ExtractMode {
  // Empty attribute means text mode.
  std::string attribute;
  bool is_text() const { return attribute.empty(); }
  std::string str() const { return is_text() ? "text" : "attr:" + attribute; }
  static std::optional<ExtractMode> parse(std::string_view s);
  bool operator==(const ExtractMode&) const = default;
};

struct ExtractSource {
  std::string url;
  std::string xpath;
  ExtractMode mode;
  bool operator==(const ExtractSource&) const = default;
};

struct LiteralValue {
  std::string value;
  bool operator==(const LiteralValue&) const = default;
};

using PropertySource = std::variant<LiteralValue, ExtractSource>;

struct Property {
  std::string name;
  PropertySource source;
  bool operator==(const Property&) const = default;
};

struct PointOfInterest {
  std::string id;
  std::string name;
  PointInSpace position;
  std::string target_url;
  std::optional<int> order;
  std::optional<std::string> code;
  std::vector<Property> props;

  const Property* prop(std::string_view name) const;
  bool operator==(const PointOfInterest&) const = default;
};

struct Band {
  std::string id;
  std::string label;
  double min = 0;  // inclusive
  double max = 0;  // exclusive
  std::string units;
  bool operator==(const Band&) const = default;
};

struct Link {
  std::string from;
  std::string to;
  bool operator==(const Link&) const = default;
  auto operator<=>(const Link&) const = default;
};

struct DimensionalSpace {
  SpaceKind kind = SpaceKind::floorplan;
  std::optional<std::string> image_url;
  std::optional<double> width;
  std::optional<double> height;
  std::vector<PointOfInterest> pois;
  std::vector<Band> bands;
  std::vector<Link> links;

  const PointOfInterest* poi(std::string_view id) const;
  const Band* band(std::string_view id) const;
  bool operator==(const DimensionalSpace&) const = default;
};

enum class PoiField { name, target_url, code };
std::string_view to_string(PoiField f);

struct PoiFieldRef {
  PoiField field = PoiField::name;
  bool operator==(const PoiFieldRef&) const = default;
};
struct PoiPropRef {
  std::string name;
  bool operator==(const PoiPropRef&) const = default;
};

using Binding = std::variant<LiteralValue, PoiFieldRef, PoiPropRef, ExtractSource>;

// Textual bind grammar used in the XML format: "" for literals, "poi.name",
// "poi.target_url", "poi.code", "poi.prop:<name>", "extract:<url>#<xpath>#<mode>".
std::string bind_expression(const Binding& b);
// Returns nullopt when the expression is malformed; `value` feeds literals.
std::optional<Binding> parse_bind_expression(std::string_view bind, std::string value);

struct AugmenterInstance {
  std::string kind;
  std::string anchor;
  std::string position = "after";
  std::vector<std::pair<std::string, Binding>> params;

  const Binding* param(std::string_view name) const;
  bool operator==(const AugmenterInstance&) const = default;
};

// Concrete target that resolves to the matched PoI's target URL.
inline constexpr std::string_view kPoiTargetUrlToken = "poi:target-url";

struct LayerTarget {
  enum class Kind { pattern, url };
  Kind kind = Kind::pattern;
  std::string value;
  bool operator==(const LayerTarget&) const = default;
};

struct Layer {
  std::string id;
  LayerTarget target;
  std::vector<AugmenterInstance> augmenters;
  bool operator==(const Layer&) const = default;
};

struct ContextRule {
  std::string sensor_id;
  std::string layer_id;
  bool operator==(const ContextRule&) const = default;
};

struct MobileAppSpec {
  std::string name;
  std::string ns;
  std::string filename;
  int version = 1;
  std::string locale = "en";
  std::set<ContextType> context_types;
  std::vector<SensorDecl> sensors;
  std::optional<DimensionalSpace> space;
  std::vector<Layer> layers;
  std::vector<ContextRule> rules;

  const SensorDecl* sensor(std::string_view id) const;
  const Layer* layer(std::string_view id) const;
  const PointOfInterest* poi(std::string_view id) const;
  bool operator==(const MobileAppSpec&) const = default;
};

}  // namespace mowa
