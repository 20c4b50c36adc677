#pragma once

#include <string>

#include "mowa/extractor.hpp"
#include "mowa/spec.hpp"

namespace mowa {

// Literal -> value; PoiField -> the PoI record; PoiProp -> the PoI's property
// source; ExtractRef -> the extractor. Throws Error with
//   binding.missing-poi
//   binding.unknown-prop       (name)
//   binding.extraction-failed  (url, xpath, cause)
std::string resolve_binding(const MobileAppSpec& spec, const Binding& binding, const PointOfInterest* poi,
                            ExtractCache* cache);

std::string resolve_property(const PropertySource& source, ExtractCache* cache);

}  // namespace mowa
