#pragma once

#include <json.hpp>

#include "mowa/spec.hpp"
#include "mowa/validate.hpp"

namespace mowa {

// JSON shape of the authoring payloads. Bindings reuse the XML bind grammar:
// {"name": "title", "bind": "poi.name"} or {"name": "title", "value": "x"}.
nlohmann::json sensor_to_json(const SensorDecl& s);
nlohmann::json space_to_json(const DimensionalSpace& s);
nlohmann::json layer_to_json(const Layer& l);
nlohmann::json spec_to_json(const MobileAppSpec& spec);

// Merges one stage's payload into `spec`, replacing the fields that stage
// owns. Throws Error("payload.invalid").
void apply_stage_payload(MobileAppSpec& spec, Stage stage, const nlohmann::json& payload);

// Inverse of apply_stage_payload: the payload that reproduces `spec`'s
// fields for that stage.
nlohmann::json stage_payload(const MobileAppSpec& spec, Stage stage);

nlohmann::json report_to_json(const ValidationReport& report);

}  // namespace mowa
