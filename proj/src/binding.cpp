#include "mowa/binding.hpp"

#include "mowa/error.hpp"

namespace mowa {
namespace {

std::string run_extract(const ExtractSource& ex, ExtractCache* cache) {
  if (!cache) {
    throw Error("binding.extraction-failed", {{"url", ex.url}, {"xpath", ex.xpath}, {"cause", "extract.no-cache"}});
  }
  try {
    return extract(ex, *cache);
  } catch (const Error& e) {
    throw Error("binding.extraction-failed", {{"url", ex.url}, {"xpath", ex.xpath}, {"cause", e.key()}});
  }
}

}  // namespace

std::string resolve_property(const PropertySource& source, ExtractCache* cache) {
  if (const auto* lit = std::get_if<LiteralValue>(&source)) return lit->value;
  return run_extract(std::get<ExtractSource>(source), cache);
}

std::string resolve_binding(const MobileAppSpec&, const Binding& binding, const PointOfInterest* poi,
                            ExtractCache* cache) {
  if (const auto* lit = std::get_if<LiteralValue>(&binding)) return lit->value;
  if (const auto* ex = std::get_if<ExtractSource>(&binding)) return run_extract(*ex, cache);
  if (!poi) throw Error("binding.missing-poi");
  if (const auto* field = std::get_if<PoiFieldRef>(&binding)) {
    switch (field->field) {
      case PoiField::name: return poi->name;
      case PoiField::target_url: return poi->target_url;
      case PoiField::code: return poi->code.value_or("");
    }
  }
  const auto& ref = std::get<PoiPropRef>(binding);
  const Property* prop = poi->prop(ref.name);
  if (!prop) throw Error("binding.unknown-prop", {{"name", ref.name}});
  return resolve_property(prop->source, cache);
}

}  // namespace mowa
