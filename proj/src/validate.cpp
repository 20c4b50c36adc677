#include "mowa/validate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>

#include "mowa/augmenters.hpp"
#include "mowa/i18n.hpp"
#include "mowa/tour.hpp"
#include "mowa/url.hpp"
#include "mowa/xpath.hpp"

namespace mowa {

std::string_view to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

size_t ValidationReport::error_count() const {
  return static_cast<size_t>(std::count_if(issues.begin(), issues.end(),
                                           [](const Issue& i) { return i.severity == Severity::error; }));
}

bool ValidationReport::has(std::string_view key) const {
  return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.key == key; });
}

void ValidationReport::merge(ValidationReport other) {
  for (auto& i : other.issues) issues.push_back(std::move(i));
  ok = error_count() == 0;
}

namespace {

bool finite(double d) { return std::isfinite(d); }

class Checker {
 public:
  Checker(const MobileAppSpec& spec, const ValidationOptions& options) : spec_(spec), options_(options) {}

  ValidationReport finish() {
    report_.ok = report_.error_count() == 0;
    return std::move(report_);
  }

  void base_data(bool complete) {
    if (spec_.name.empty()) error("app", "app.name-empty");
    static const std::regex kReverseDomain(R"(^[A-Za-z][A-Za-z0-9_-]*(\.[A-Za-z0-9_-]+)+$)");
    if (!spec_.ns.empty() && !std::regex_match(spec_.ns, kReverseDomain)) {
      error("app", "app.namespace-invalid", {{"ns", spec_.ns}});
    }
    if (spec_.version != 1) error("app", "app.version-unsupported", {{"version", std::to_string(spec_.version)}});
    if (!i18n::has_locale(spec_.locale)) warning("app", "app.locale-unsupported", {{"locale", spec_.locale}});
    if (complete && spec_.ns.empty()) error("app", "app.namespace-invalid", {{"ns", ""}});
    if (complete && spec_.filename.empty()) error("app", "app.filename-empty");
  }

  void context_types(bool complete) {
    if (complete && spec_.context_types.empty()) error("context-types", "context-types.empty");
  }

  void sensors(bool complete) {
    if (complete && spec_.sensors.empty()) error("sensors", "sensors.empty");
    std::set<std::string> ids;
    for (const auto& s : spec_.sensors) {
      std::string path = "sensors/" + s.id;
      if (s.id.empty()) error(path, "sensor.id-empty");
      if (!ids.insert(s.id).second) error(path, "sensor.duplicate-id", {{"id", s.id}});
      if (s.context_type != context_type_of(s.kind)) {
        error(path, "sensor.kind-mismatch",
              {{"kind", std::string(to_string(s.kind))}, {"context_type", std::string(to_string(s.context_type))}});
      }
      if (!spec_.context_types.count(s.context_type)) {
        error(path, "sensor.context-type-unselected", {{"context_type", std::string(to_string(s.context_type))}});
      }
      if (s.kind == SensorKind::gps && !(finite(s.radius_m) && s.radius_m > 0)) {
        error(path, "sensor.radius-invalid", {{"id", s.id}});
      }
    }
    if (complete) {
      for (auto t : spec_.context_types) {
        bool observed = std::any_of(spec_.sensors.begin(), spec_.sensors.end(),
                                    [&](const SensorDecl& s) { return s.context_type == t; });
        if (!observed) warning("context-types", "context-type.unobserved", {{"context_type", std::string(to_string(t))}});
      }
    }
  }

  void values_of_interest(bool complete) {
    if (!spec_.space) {
      bool needs_space = std::any_of(spec_.sensors.begin(), spec_.sensors.end(),
                                     [](const SensorDecl& s) { return s.kind != SensorKind::orientation; });
      if (complete && needs_space) error("space", "space.missing");
      return;
    }
    const auto& space = *spec_.space;
    for (const auto& s : spec_.sensors) {
      if (!space_fits(space.kind, s.kind)) {
        error("space", "space.kind-mismatch",
              {{"space", std::string(to_string(space.kind))}, {"sensor", s.id}});
      }
    }
    if (space.kind == SpaceKind::floorplan) {
      if (!space.image_url || space.image_url->empty()) error("space", "space.image-missing");
    }
    bool bounded = space.kind == SpaceKind::floorplan;
    if (bounded && !(space.width && space.height && finite(*space.width) && finite(*space.height) &&
                     *space.width > 0 && *space.height > 0)) {
      error("space", "space.size-invalid");
      bounded = false;
    }
    for (const auto* d : {&space.width, &space.height}) {
      if (!bounded && *d && !(finite(**d) && **d > 0)) error("space", "space.size-invalid");
    }

    bool location = is_location_space(space.kind);
    if (location && !space.bands.empty()) error("space", "space.content-mismatch", {{"space", std::string(to_string(space.kind))}});
    if (!location && (!space.pois.empty() || !space.links.empty())) {
      error("space", "space.content-mismatch", {{"space", std::string(to_string(space.kind))}});
    }
    if (complete && location && space.pois.empty()) error("space", "space.no-pois");
    if (complete && !location && space.bands.empty()) error("space", "space.no-bands");

    pois(space, bounded);
    links(space);
    bands(space);
  }

  void layers(bool complete) {
    if (complete && spec_.layers.empty()) error("layers", "layers.empty");
    std::set<std::string> ids;
    for (const auto& layer : spec_.layers) {
      std::string path = "layers/" + layer.id;
      if (layer.id.empty()) error(path, "layer.id-empty");
      if (!ids.insert(layer.id).second) error(path, "layer.duplicate-id", {{"id", layer.id}});
      if (layer.target.kind == LayerTarget::Kind::pattern) {
        if (layer.target.value.empty()) error(path, "layer.pattern-empty");
      } else if (layer.target.value != kPoiTargetUrlToken && !url::is_absolute(layer.target.value)) {
        error(path, "layer.url-invalid", {{"url", layer.target.value}});
      }
      if (complete && layer.augmenters.empty()) warning(path, "layer.no-augmenters", {{"id", layer.id}});
      for (size_t i = 0; i < layer.augmenters.size(); ++i) {
        augmenter(layer.augmenters[i], path + "/augmenter[" + std::to_string(i + 1) + "]");
      }
    }
  }

  void rules(bool complete) {
    if (complete && spec_.rules.empty()) error("rules", "rules.empty");
    std::set<std::pair<std::string, std::string>> seen;
    for (size_t i = 0; i < spec_.rules.size(); ++i) {
      const auto& r = spec_.rules[i];
      std::string path = "rules/rule[" + std::to_string(i + 1) + "]";
      if (!spec_.sensor(r.sensor_id)) error(path, "rule.sensor-unknown", {{"id", r.sensor_id}});
      if (!spec_.layer(r.layer_id)) error(path, "rule.layer-unknown", {{"id", r.layer_id}});
      if (!seen.insert({r.sensor_id, r.layer_id}).second) {
        warning(path, "rule.duplicate", {{"sensor", r.sensor_id}, {"layer", r.layer_id}});
      }
    }
    if (complete) {
      for (const auto& layer : spec_.layers) {
        bool observed = std::any_of(spec_.rules.begin(), spec_.rules.end(),
                                    [&](const ContextRule& r) { return r.layer_id == layer.id; });
        bool pattern = layer.target.kind == LayerTarget::Kind::pattern;
        if (!observed && !pattern) warning("layers/" + layer.id, "layer.unobserved", {{"id", layer.id}});
      }
    }
  }

 private:
  static bool space_fits(SpaceKind space, SensorKind sensor) {
    switch (sensor) {
      case SensorKind::gps:
      case SensorKind::qr: return is_location_space(space);
      case SensorKind::lux:
      case SensorKind::db: return space == SpaceKind::scalar_scale;
      case SensorKind::clock: return space == SpaceKind::time_scale;
      case SensorKind::orientation: return space == SpaceKind::angle_scale;
    }
    return false;
  }

  void pois(const DimensionalSpace& space, bool bounded) {
    std::set<std::string> ids;
    std::map<int, std::string> orders;
    std::map<std::string, std::string> codes;
    for (const auto& p : space.pois) {
      std::string path = "space/poi[" + p.id + "]";
      if (p.id.empty()) error(path, "poi.id-empty");
      if (!ids.insert(p.id).second) error(path, "poi.duplicate-id", {{"id", p.id}});
      if (p.name.empty()) error(path, "poi.name-empty", {{"id", p.id}});
      if (!url::is_absolute(p.target_url)) error(path, "poi.url-invalid", {{"id", p.id}, {"url", p.target_url}});
      const auto& pos = p.position;
      if (!finite(pos.x) || !finite(pos.y) || (pos.z && !finite(*pos.z))) {
        error(path, "poi.coordinate-invalid", {{"id", p.id}});
      } else if (bounded && (pos.x < 0 || pos.y < 0 || pos.x > *space.width || pos.y > *space.height)) {
        error(path, "poi.out-of-bounds", {{"id", p.id}});
      } else if (space.kind == SpaceKind::map2d && (std::abs(pos.x) > 180 || std::abs(pos.y) > 90)) {
        error(path, "poi.out-of-bounds", {{"id", p.id}});
      }
      if (p.order) {
        if (*p.order < 1) error(path, "poi.order-invalid", {{"id", p.id}});
        auto [it, inserted] = orders.emplace(*p.order, p.id);
        if (!inserted) error(path, "poi.duplicate-order", {{"order", std::to_string(*p.order)}, {"id", p.id}, {"other", it->second}});
      } else if (!space.links.empty()) {
        warning(path, "poi.order-missing", {{"id", p.id}});
      }
      if (p.code) {
        auto [it, inserted] = codes.emplace(*p.code, p.id);
        if (!inserted) error(path, "poi.duplicate-code", {{"id", p.id}, {"other", it->second}});
      }
      std::set<std::string> prop_names;
      for (const auto& prop : p.props) {
        std::string pp = path + "/prop[" + prop.name + "]";
        if (prop.name.empty()) error(pp, "prop.name-empty", {{"id", p.id}});
        if (!prop_names.insert(prop.name).second) error(pp, "prop.duplicate", {{"name", prop.name}});
        if (const auto* ex = std::get_if<ExtractSource>(&prop.source)) extract_source(*ex, pp, "prop");
      }
    }
  }

  void links(const DimensionalSpace& space) {
    std::set<Link> seen;
    bool structural_ok = true;
    for (const auto& l : space.links) {
      std::string path = "space/link[" + l.from + "->" + l.to + "]";
      if (!space.poi(l.from) || !space.poi(l.to)) {
        error(path, "link.dangling", {{"from", l.from}, {"to", l.to}});
        structural_ok = false;
      }
      if (l.from == l.to) {
        error(path, "link.self", {{"id", l.from}});
        structural_ok = false;
      }
      if (!seen.insert(l).second) {
        error(path, "link.duplicate", {{"from", l.from}, {"to", l.to}});
        structural_ok = false;
      }
    }
    if (structural_ok && !space.links.empty()) {
      try {
        derive_tour_order(space);
      } catch (const Error&) {
        error("space/links", "links.not-a-chain");
      }
    }
  }

  void bands(const DimensionalSpace& space) {
    std::set<std::string> ids;
    for (const auto& b : space.bands) {
      std::string path = "space/band[" + b.id + "]";
      if (b.id.empty()) error(path, "band.id-empty");
      if (!ids.insert(b.id).second) error(path, "band.duplicate-id", {{"id", b.id}});
      if (!finite(b.min) || !finite(b.max)) {
        error(path, "band.value-invalid", {{"id", b.id}});
      } else if (!(b.min < b.max)) {
        error(path, "band.empty-range", {{"id", b.id}});
      }
    }
    for (size_t i = 0; i < space.bands.size(); ++i) {
      for (size_t j = i + 1; j < space.bands.size(); ++j) {
        const auto& a = space.bands[i];
        const auto& b = space.bands[j];
        if (a.min < a.max && b.min < b.max && a.min < b.max && b.min < a.max) {
          error("space/band[" + b.id + "]", "band.overlap", {{"a", a.id}, {"b", b.id}});
        }
      }
    }
  }

  void extract_source(const ExtractSource& ex, const std::string& path, const std::string& prefix) {
    auto normalized = url::normalize(ex.url);
    if (!normalized) error(path, prefix + ".url-invalid", {{"url", ex.url}});
    if (!xpath::Expr::valid(ex.xpath)) error(path, prefix + ".xpath-invalid", {{"xpath", ex.xpath}});
    if (normalized && options_.known_urls && !options_.known_urls->count(*normalized)) {
      warning(path, prefix + ".extract-url-unknown", {{"url", *normalized}});
    }
  }

  void augmenter(const AugmenterInstance& a, const std::string& path) {
    const auto* kind = augmenters::find_kind(a.kind);
    if (!kind) {
      error(path, "augmenter.kind-unknown", {{"kind", a.kind}});
      return;
    }
    if (!xpath::Expr::valid(a.anchor)) error(path, "augmenter.anchor-invalid", {{"xpath", a.anchor}});
    if (!html::position_from_string(a.position)) error(path, "augmenter.position-invalid", {{"position", a.position}});

    bool compatible = std::any_of(kind->compatible_context_types.begin(), kind->compatible_context_types.end(),
                                  [&](ContextType t) { return spec_.context_types.count(t) > 0; });
    if (!compatible && !spec_.context_types.empty()) warning(path, "augmenter.incompatible", {{"kind", a.kind}});

    auto required = augmenters::required_param_names(*kind, spec_.space);
    for (const auto& name : required) {
      if (!a.param(name)) error(path, "augmenter.param-missing", {{"kind", a.kind}, {"name", name}});
    }
    std::set<std::string> names;
    for (const auto& [name, binding] : a.params) {
      std::string pp = path + "/param[" + name + "]";
      if (!names.insert(name).second) error(pp, "augmenter.param-duplicate", {{"name", name}});
      bool known = std::find(required.begin(), required.end(), name) != required.end() ||
                   std::any_of(kind->optional_params.begin(), kind->optional_params.end(),
                               [&](const augmenters::ParamDecl& d) { return d.name == name; });
      if (!known) warning(pp, "augmenter.param-unknown", {{"kind", a.kind}, {"name", name}});
      binding_checks(binding, pp);
      if (name == "media-xpath") {
        const auto* lit = std::get_if<LiteralValue>(&binding);
        if (lit && !xpath::Expr::valid(lit->value)) error(pp, "augmenter.param-invalid", {{"name", name}});
      }
    }
  }

  void binding_checks(const Binding& b, const std::string& path) {
    if (const auto* prop = std::get_if<PoiPropRef>(&b)) {
      bool exists = spec_.space && std::any_of(spec_.space->pois.begin(), spec_.space->pois.end(),
                                               [&](const PointOfInterest& p) { return p.prop(prop->name) != nullptr; });
      if (!exists) error(path, "binding.prop-unknown", {{"name", prop->name}});
    } else if (const auto* ex = std::get_if<ExtractSource>(&b)) {
      extract_source(*ex, path, "binding");
    }
  }

  void add(Severity sev, std::string path, std::string key, Error::Args args) {
    Issue issue;
    issue.severity = sev;
    issue.path = std::move(path);
    issue.message = i18n::message(key, args, options_.locale);
    issue.key = std::move(key);
    issue.args = std::move(args);
    report_.issues.push_back(std::move(issue));
  }
  void error(std::string path, std::string key, Error::Args args = {}) {
    add(Severity::error, std::move(path), std::move(key), std::move(args));
  }
  void warning(std::string path, std::string key, Error::Args args = {}) {
    add(Severity::warning, std::move(path), std::move(key), std::move(args));
  }

  const MobileAppSpec& spec_;
  const ValidationOptions& options_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate_spec(const MobileAppSpec& spec, const ValidationOptions& options) {
  Checker c(spec, options);
  c.base_data(false);
  c.context_types(false);
  c.sensors(false);
  c.values_of_interest(false);
  c.layers(false);
  c.rules(false);
  return c.finish();
}

ValidationReport validate_stage(const MobileAppSpec& spec, Stage stage, const ValidationOptions& options) {
  Checker c(spec, options);
  switch (stage) {
    case Stage::base_data: c.base_data(true); break;
    case Stage::context_types: c.context_types(true); break;
    case Stage::sensors: c.sensors(true); break;
    case Stage::values_of_interest: c.values_of_interest(true); break;
    case Stage::layers: c.layers(true); break;
    case Stage::rules: c.rules(true); break;
  }
  return c.finish();
}

}  // namespace mowa
