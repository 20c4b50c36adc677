#include "mowa/spec_json.hpp"

#include "mowa/error.hpp"

namespace mowa {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
  throw Error("payload.invalid", {{"detail", where + ": " + what}});
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) invalid(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) invalid(where, std::string("missing '") + key + "'");
  return *it;
}

std::string str(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_string()) invalid(where, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::string str_or(const json& j, const char* key, std::string fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return str(j, key, where);
}

double num(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number()) invalid(where, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::optional<double> opt_num(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return num(j, key, where);
}

const json& arr(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_array()) invalid(where, std::string("'") + key + "' must be an array");
  return v;
}

json extract_to_json(const ExtractSource& e) { return {{"url", e.url}, {"xpath", e.xpath}, {"mode", e.mode.str()}}; }

ExtractSource extract_from_json(const json& j, const std::string& where) {
  auto mode = ExtractMode::parse(str(j, "mode", where));
  if (!mode) invalid(where, "mode must be 'text' or 'attr:NAME'");
  return {str(j, "url", where), str(j, "xpath", where), *mode};
}

Property prop_from_json(const json& j, const std::string& where) {
  Property p;
  p.name = str(j, "name", where);
  if (j.contains("extract")) {
    p.source = extract_from_json(j["extract"], where + ".extract");
  } else {
    p.source = LiteralValue{str(j, "value", where)};
  }
  return p;
}

PointOfInterest poi_from_json(const json& j, const std::string& where) {
  PointOfInterest p;
  p.id = str(j, "id", where);
  p.name = str_or(j, "name", "", where);
  p.position.x = num(j, "x", where);
  p.position.y = num(j, "y", where);
  p.position.z = opt_num(j, "z", where);
  p.target_url = str_or(j, "target_url", "", where);
  if (j.contains("order") && !j["order"].is_null()) {
    if (!j["order"].is_number_integer()) invalid(where, "'order' must be an integer");
    p.order = j["order"].get<int>();
  }
  if (j.contains("code") && !j["code"].is_null()) p.code = str(j, "code", where);
  if (j.contains("props")) {
    const json& props = arr(j, "props", where);
    for (size_t i = 0; i < props.size(); ++i) {
      p.props.push_back(prop_from_json(props[i], where + ".props[" + std::to_string(i) + "]"));
    }
  }
  return p;
}

DimensionalSpace space_from_json(const json& j, const std::string& where) {
  DimensionalSpace s;
  auto kind = space_kind_from_string(str(j, "kind", where));
  if (!kind) invalid(where, "unknown space kind");
  s.kind = *kind;
  if (j.contains("image_url") && !j["image_url"].is_null()) s.image_url = str(j, "image_url", where);
  s.width = opt_num(j, "width", where);
  s.height = opt_num(j, "height", where);
  if (j.contains("pois")) {
    const json& pois = arr(j, "pois", where);
    for (size_t i = 0; i < pois.size(); ++i) s.pois.push_back(poi_from_json(pois[i], where + ".pois[" + std::to_string(i) + "]"));
  }
  if (j.contains("bands")) {
    const json& bands = arr(j, "bands", where);
    for (size_t i = 0; i < bands.size(); ++i) {
      std::string w = where + ".bands[" + std::to_string(i) + "]";
      s.bands.push_back({str(bands[i], "id", w), str_or(bands[i], "label", "", w), num(bands[i], "min", w),
                         num(bands[i], "max", w), str_or(bands[i], "units", "", w)});
    }
  }
  if (j.contains("links")) {
    const json& links = arr(j, "links", where);
    for (size_t i = 0; i < links.size(); ++i) {
      std::string w = where + ".links[" + std::to_string(i) + "]";
      s.links.push_back({str(links[i], "from", w), str(links[i], "to", w)});
    }
  }
  return s;
}

json param_to_json(const std::string& name, const Binding& b) {
  if (auto* lit = std::get_if<LiteralValue>(&b)) return {{"name", name}, {"value", lit->value}};
  return {{"name", name}, {"bind", bind_expression(b)}};
}

Layer layer_from_json(const json& j, const std::string& where) {
  Layer l;
  l.id = str(j, "id", where);
  const json& target = field(j, "target", where);
  std::string kind = str(target, "kind", where + ".target");
  if (kind == "pattern") {
    l.target.kind = LayerTarget::Kind::pattern;
  } else if (kind == "url") {
    l.target.kind = LayerTarget::Kind::url;
  } else {
    invalid(where + ".target", "kind must be 'pattern' or 'url'");
  }
  l.target.value = str(target, "value", where + ".target");
  if (j.contains("augmenters")) {
    const json& augs = arr(j, "augmenters", where);
    for (size_t i = 0; i < augs.size(); ++i) {
      std::string w = where + ".augmenters[" + std::to_string(i) + "]";
      AugmenterInstance a;
      a.kind = str(augs[i], "kind", w);
      a.anchor = str(augs[i], "anchor", w);
      a.position = str_or(augs[i], "position", a.position, w);
      if (augs[i].contains("params")) {
        const json& params = arr(augs[i], "params", w);
        for (size_t k = 0; k < params.size(); ++k) {
          std::string pw = w + ".params[" + std::to_string(k) + "]";
          std::string name = str(params[k], "name", pw);
          std::optional<Binding> b;
          if (params[k].contains("bind")) {
            b = parse_bind_expression(str(params[k], "bind", pw), "");
            if (!b || std::holds_alternative<LiteralValue>(*b)) invalid(pw, "malformed bind expression");
          } else {
            b = Binding{LiteralValue{str(params[k], "value", pw)}};
          }
          a.params.emplace_back(std::move(name), std::move(*b));
        }
      }
      l.augmenters.push_back(std::move(a));
    }
  }
  return l;
}

}  // namespace

json sensor_to_json(const SensorDecl& s) {
  json j{{"id", s.id}, {"kind", to_string(s.kind)}, {"context_type", to_string(s.context_type)}};
  if (s.kind == SensorKind::gps) j["radius_m"] = s.radius_m;
  return j;
}

json space_to_json(const DimensionalSpace& s) {
  json j{{"kind", to_string(s.kind)}};
  if (s.image_url) j["image_url"] = *s.image_url;
  if (s.width) j["width"] = *s.width;
  if (s.height) j["height"] = *s.height;
  j["pois"] = json::array();
  for (const auto& p : s.pois) {
    json pj{{"id", p.id}, {"name", p.name}, {"x", p.position.x}, {"y", p.position.y}, {"target_url", p.target_url}};
    if (p.position.z) pj["z"] = *p.position.z;
    if (p.order) pj["order"] = *p.order;
    if (p.code) pj["code"] = *p.code;
    pj["props"] = json::array();
    for (const auto& prop : p.props) {
      if (auto* lit = std::get_if<LiteralValue>(&prop.source)) {
        pj["props"].push_back({{"name", prop.name}, {"value", lit->value}});
      } else {
        pj["props"].push_back({{"name", prop.name}, {"extract", extract_to_json(std::get<ExtractSource>(prop.source))}});
      }
    }
    j["pois"].push_back(std::move(pj));
  }
  j["bands"] = json::array();
  for (const auto& b : s.bands) {
    j["bands"].push_back({{"id", b.id}, {"label", b.label}, {"min", b.min}, {"max", b.max}, {"units", b.units}});
  }
  j["links"] = json::array();
  for (const auto& l : s.links) j["links"].push_back({{"from", l.from}, {"to", l.to}});
  return j;
}

json layer_to_json(const Layer& l) {
  json j{{"id", l.id},
         {"target", {{"kind", l.target.kind == LayerTarget::Kind::pattern ? "pattern" : "url"}, {"value", l.target.value}}}};
  j["augmenters"] = json::array();
  for (const auto& a : l.augmenters) {
    json aj{{"kind", a.kind}, {"anchor", a.anchor}, {"position", a.position}, {"params", json::array()}};
    for (const auto& [name, b] : a.params) aj["params"].push_back(param_to_json(name, b));
    j["augmenters"].push_back(std::move(aj));
  }
  return j;
}

json stage_payload(const MobileAppSpec& spec, Stage stage) {
  switch (stage) {
    case Stage::base_data:
      return {{"name", spec.name}, {"ns", spec.ns}, {"filename", spec.filename}, {"locale", spec.locale}};
    case Stage::context_types: {
      json types = json::array();
      for (auto t : spec.context_types) types.push_back(to_string(t));
      return {{"context_types", types}};
    }
    case Stage::sensors: {
      json s = json::array();
      for (const auto& d : spec.sensors) s.push_back(sensor_to_json(d));
      return {{"sensors", s}};
    }
    case Stage::values_of_interest:
      return {{"space", spec.space ? space_to_json(*spec.space) : json(nullptr)}};
    case Stage::layers: {
      json ls = json::array();
      for (const auto& l : spec.layers) ls.push_back(layer_to_json(l));
      return {{"layers", ls}};
    }
    case Stage::rules: {
      json rs = json::array();
      for (const auto& r : spec.rules) rs.push_back({{"sensor", r.sensor_id}, {"layer", r.layer_id}});
      return {{"rules", rs}};
    }
  }
  return {};
}

json spec_to_json(const MobileAppSpec& spec) {
  json j = stage_payload(spec, Stage::base_data);
  j["version"] = spec.version;
  for (int s = 2; s <= kStageCount; ++s) j.update(stage_payload(spec, static_cast<Stage>(s)));
  return j;
}

void apply_stage_payload(MobileAppSpec& spec, Stage stage, const json& payload) {
  if (!payload.is_object()) invalid("payload", "expected an object");
  switch (stage) {
    case Stage::base_data:
      spec.name = str(payload, "name", "payload");
      spec.ns = str_or(payload, "ns", "", "payload");
      spec.filename = str_or(payload, "filename", "", "payload");
      spec.locale = str_or(payload, "locale", spec.locale, "payload");
      break;
    case Stage::context_types: {
      std::set<ContextType> types;
      for (const auto& t : arr(payload, "context_types", "payload")) {
        auto ct = t.is_string() ? context_type_from_string(t.get<std::string>()) : std::nullopt;
        if (!ct) invalid("payload.context_types", "unknown context type " + t.dump());
        types.insert(*ct);
      }
      spec.context_types = std::move(types);
      break;
    }
    case Stage::sensors: {
      std::vector<SensorDecl> sensors;
      const json& list = arr(payload, "sensors", "payload");
      for (size_t i = 0; i < list.size(); ++i) {
        std::string w = "payload.sensors[" + std::to_string(i) + "]";
        SensorDecl d;
        d.id = str(list[i], "id", w);
        auto kind = sensor_kind_from_string(str(list[i], "kind", w));
        if (!kind) invalid(w, "unknown sensor kind");
        d.kind = *kind;
        d.context_type = context_type_of(d.kind);
        if (list[i].contains("context_type")) {
          auto ct = context_type_from_string(str(list[i], "context_type", w));
          if (!ct) invalid(w, "unknown context type");
          d.context_type = *ct;
        }
        if (auto r = opt_num(list[i], "radius_m", w)) d.radius_m = *r;
        sensors.push_back(std::move(d));
      }
      spec.sensors = std::move(sensors);
      break;
    }
    case Stage::values_of_interest: {
      const json& s = field(payload, "space", "payload");
      if (s.is_null()) {
        spec.space.reset();
      } else {
        spec.space = space_from_json(s, "payload.space");
      }
      break;
    }
    case Stage::layers: {
      std::vector<Layer> layers;
      const json& list = arr(payload, "layers", "payload");
      for (size_t i = 0; i < list.size(); ++i) layers.push_back(layer_from_json(list[i], "payload.layers[" + std::to_string(i) + "]"));
      spec.layers = std::move(layers);
      break;
    }
    case Stage::rules: {
      std::vector<ContextRule> rules;
      if (payload.contains("rules")) {
        const json& list = arr(payload, "rules", "payload");
        for (size_t i = 0; i < list.size(); ++i) {
          std::string w = "payload.rules[" + std::to_string(i) + "]";
          rules.push_back({str(list[i], "sensor", w), str(list[i], "layer", w)});
        }
      }
      spec.rules = std::move(rules);
      break;
    }
  }
}

json report_to_json(const ValidationReport& report) {
  json issues = json::array();
  for (const auto& i : report.issues) {
    issues.push_back({{"severity", to_string(i.severity)},
                      {"path", i.path},
                      {"key", i.key},
                      {"message", i.message},
                      {"args", i.args}});
  }
  return {{"ok", report.ok}, {"errors", report.error_count()}, {"issues", issues}};
}

}  // namespace mowa
