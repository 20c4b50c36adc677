#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mowa/spec.hpp"

namespace mowa {

struct NavEvent {
  std::string url;
  bool operator==(const NavEvent&) const = default;
};
// Geographic reading in degrees. On a floor plan the pair is read as (y, x)
// in plan units.
struct GpsEvent {
  double lat = 0;
  double lon = 0;
  bool operator==(const GpsEvent&) const = default;
};
struct QrEvent {
  std::string payload;
  bool operator==(const QrEvent&) const = default;
};
struct ScalarEvent {
  std::string sensor_id;
  double value = 0;
  bool operator==(const ScalarEvent&) const = default;
};
struct OrientationEvent {
  double alpha = 0;
  double beta = 0;
  double gamma = 0;
  bool operator==(const OrientationEvent&) const = default;
};
struct ClockEvent {
  int minutes = 0;
  bool operator==(const ClockEvent&) const = default;
};

using SimPayload = std::variant<NavEvent, GpsEvent, QrEvent, ScalarEvent, OrientationEvent, ClockEvent>;

struct SimEvent {
  int64_t t_ms = 0;
  SimPayload payload;
  bool operator==(const SimEvent&) const = default;
};

// One JSON object per line; blank lines are skipped. Throws Error with
// trace.syntax (line, detail) or trace.unsorted (line).
std::vector<SimEvent> parse_trace(std::string_view jsonl);
// A single reading in the trace line format; `t` defaults to 0.
SimEvent parse_event(std::string_view json);
std::string to_json_line(const SimEvent& ev);

struct AtPoi {
  std::string poi_id;
  bool operator==(const AtPoi&) const = default;
};
struct LeftPois {
  bool operator==(const LeftPois&) const = default;
};
struct InBand {
  std::string band_id;
  bool operator==(const InBand&) const = default;
};
enum class Orientation { portrait, landscape };
struct OrientationMode {
  Orientation mode = Orientation::portrait;
  bool operator==(const OrientationMode&) const = default;
};

using Semantic = std::variant<AtPoi, LeftPois, InBand, OrientationMode>;

// Compact form used in logs: "at:p1", "left", "band:quiet", "orientation:landscape".
std::string describe(const Semantic& s);
std::string_view to_string(Orientation o);

struct ContextChange {
  std::string sensor_id;
  int64_t t_ms = 0;
  Semantic value;
  bool operator==(const ContextChange&) const = default;
};

struct SensorState {
  std::map<std::string, Semantic> last;
  bool operator==(const SensorState&) const = default;
};

inline constexpr double kLandscapeGammaDeg = 45.0;
inline constexpr double kEarthRadiusM = 6371008.8;

double haversine_m(double lat1, double lon1, double lat2, double lon2);

// PoI positions in a map2d space are (x = longitude, y = latitude).
std::optional<std::string> match_location(const QrEvent& reading, const DimensionalSpace& space);
std::optional<std::string> match_location(const GpsEvent& reading, const DimensionalSpace& space,
                                          const SensorDecl& sensor);

// Half-open: min <= value < max.
std::optional<std::string> match_band(double value, const std::vector<Band>& bands);

Orientation orientation_of(const OrientationEvent& ev);

// The declared sensor that observes `payload`. Throws Error("sensor.unknown")
// or Error("sensor.ambiguous"). Nav events have no sensor.
const SensorDecl* sensor_for(const MobileAppSpec& spec, const SimPayload& payload);

// Emits a change only when the sensor's semantic value differs from the last
// one. A location reading that matches nothing yields LeftPois, except before
// any PoI was seen; an out-of-band scalar emits nothing and forgets the band.
std::pair<SensorState, std::optional<ContextChange>> step(const SensorState& state, const MobileAppSpec& spec,
                                                          const SimEvent& ev);

}  // namespace mowa
