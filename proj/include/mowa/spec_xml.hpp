#pragma once

#include <string>
#include <string_view>

#include "mowa/spec.hpp"

namespace mowa {

// Parses a `mowa-app` document. Throws Error with key
//   xml.syntax               (line, column)
//   spec.schema-violation    (path, reason)
//   spec.dangling-reference  (id)
MobileAppSpec parse_spec(std::string_view xml);

// Canonical form: fixed element order, attributes sorted by name, 2-space
// indent, UTF-8. Throws Error("spec.invalid") when validation reports errors.
std::string serialize_spec(const MobileAppSpec& spec);

// Same output without the validation gate; used for partial authoring state.
std::string serialize_spec_unchecked(const MobileAppSpec& spec);

}  // namespace mowa
