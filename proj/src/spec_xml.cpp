#include "mowa/spec_xml.hpp"

#include <array>
#include <expat.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <set>

#include "mowa/error.hpp"
#include "mowa/validate.hpp"

namespace mowa {
namespace {

// --- generic element tree --------------------------------------------------

struct XmlElement {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<std::unique_ptr<XmlElement>> children;
  bool has_text = false;
  long line = 0;
};

struct TreeBuilder {
  XML_Parser parser = nullptr;
  std::unique_ptr<XmlElement> root;
  std::vector<XmlElement*> stack;

  static void start(void* user, const XML_Char* name, const XML_Char** atts) {
    auto* self = static_cast<TreeBuilder*>(user);
    auto el = std::make_unique<XmlElement>();
    el->name = name;
    el->line = static_cast<long>(XML_GetCurrentLineNumber(self->parser));
    for (size_t i = 0; atts[i]; i += 2) el->attrs.emplace_back(atts[i], atts[i + 1]);
    XmlElement* raw = el.get();
    if (self->stack.empty()) {
      self->root = std::move(el);
    } else {
      self->stack.back()->children.push_back(std::move(el));
    }
    self->stack.push_back(raw);
  }

  static void end(void* user, const XML_Char*) { static_cast<TreeBuilder*>(user)->stack.pop_back(); }

  static void text(void* user, const XML_Char* s, int len) {
    auto* self = static_cast<TreeBuilder*>(user);
    if (self->stack.empty()) return;
    for (int i = 0; i < len; ++i) {
      char c = s[i];
      if (c != ' ' && c != '\t' && c != '\n' && c != '\r') {
        self->stack.back()->has_text = true;
        return;
      }
    }
  }
};

std::unique_ptr<XmlElement> build_tree(std::string_view xml) {
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"), &XML_ParserFree);
  TreeBuilder builder;
  builder.parser = parser.get();
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), &TreeBuilder::start, &TreeBuilder::end);
  XML_SetCharacterDataHandler(parser.get(), &TreeBuilder::text);
  if (XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE) == XML_STATUS_ERROR) {
    throw Error("xml.syntax", {{"line", std::to_string(XML_GetCurrentLineNumber(parser.get()))},
                               {"column", std::to_string(XML_GetCurrentColumnNumber(parser.get()))},
                               {"reason", XML_ErrorString(XML_GetErrorCode(parser.get()))}});
  }
  if (!builder.root) throw Error("xml.syntax", {{"line", "1"}, {"column", "0"}, {"reason", "no root element"}});
  return std::move(builder.root);
}

// --- schema mapping --------------------------------------------------------

[[noreturn]] void violation(const std::string& path, std::string reason) {
  throw Error("spec.schema-violation", {{"path", path}, {"reason", std::move(reason)}});
}

class Reader {
 public:
  Reader(const XmlElement& el, std::string path, std::initializer_list<std::string_view> allowed)
      : el_(el), path_(std::move(path)) {
    if (el.has_text) violation(path_, "unexpected text content");
    for (const auto& [name, value] : el.attrs) {
      if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
        violation(path_, "unknown attribute '" + name + "'");
      }
    }
  }

  const std::string& path() const { return path_; }

  std::optional<std::string> opt(std::string_view name) const {
    for (const auto& [n, v] : el_.attrs) {
      if (n == name) return v;
    }
    return std::nullopt;
  }

  std::string req(std::string_view name) const {
    auto v = opt(name);
    if (!v) violation(path_, "missing attribute '" + std::string(name) + "'");
    return *v;
  }

  std::string str(std::string_view name) const { return opt(name).value_or(""); }

  std::optional<double> opt_number(std::string_view name) const {
    auto v = opt(name);
    if (!v) return std::nullopt;
    double d = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), d);
    if (v->empty() || ec != std::errc{} || ptr != v->data() + v->size()) {
      violation(path_, "attribute '" + std::string(name) + "' is not a number");
    }
    return d;
  }

  double req_number(std::string_view name) const {
    req(name);
    return *opt_number(name);
  }

  std::optional<int> opt_int(std::string_view name) const {
    auto v = opt(name);
    if (!v) return std::nullopt;
    int i = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), i);
    if (v->empty() || ec != std::errc{} || ptr != v->data() + v->size()) {
      violation(path_, "attribute '" + std::string(name) + "' is not an integer");
    }
    return i;
  }

  void no_children() const {
    if (!el_.children.empty()) violation(path_, "unexpected child <" + el_.children.front()->name + ">");
  }

  // Children must all be named `name`.
  std::vector<const XmlElement*> children_named(std::string_view name) const {
    std::vector<const XmlElement*> out;
    for (const auto& c : el_.children) {
      if (c->name != name) violation(path_, "unexpected child <" + c->name + ">");
      out.push_back(c.get());
    }
    return out;
  }

 private:
  const XmlElement& el_;
  std::string path_;
};

std::string child_path(const std::string& parent, std::string_view name, std::string_view key) {
  std::string out = parent + "/" + std::string(name);
  if (!key.empty()) out += "[" + std::string(key) + "]";
  return out;
}

std::string key_of(const XmlElement& el, std::string_view attr, size_t index) {
  for (const auto& [n, v] : el.attrs) {
    if (n == attr) return v;
  }
  return std::to_string(index + 1);
}

Property read_prop(const XmlElement& el, const std::string& path) {
  Reader r(el, path, {"name", "source", "value", "url", "xpath", "mode"});
  r.no_children();
  Property p;
  p.name = r.req("name");
  std::string source = r.req("source");
  if (source == "literal") {
    if (r.opt("url") || r.opt("xpath") || r.opt("mode")) violation(path, "literal prop takes only 'value'");
    p.source = LiteralValue{r.str("value")};
  } else if (source == "extract") {
    if (r.opt("value")) violation(path, "extract prop takes url, xpath and mode");
    auto mode = ExtractMode::parse(r.opt("mode").value_or("text"));
    if (!mode) violation(path, "unknown extraction mode");
    p.source = ExtractSource{r.req("url"), r.req("xpath"), *mode};
  } else {
    violation(path, "unknown prop source '" + source + "'");
  }
  return p;
}

PointOfInterest read_poi(const XmlElement& el, const std::string& path) {
  Reader r(el, path, {"id", "name", "x", "y", "z", "order", "target-url", "code"});
  PointOfInterest poi;
  poi.id = r.req("id");
  poi.name = r.str("name");
  poi.position.x = r.req_number("x");
  poi.position.y = r.req_number("y");
  poi.position.z = r.opt_number("z");
  poi.order = r.opt_int("order");
  poi.target_url = r.str("target-url");
  poi.code = r.opt("code");
  size_t i = 0;
  for (const auto* c : r.children_named("prop")) {
    poi.props.push_back(read_prop(*c, child_path(path, "prop", key_of(*c, "name", i++))));
  }
  return poi;
}

DimensionalSpace read_space(const XmlElement& el, const std::string& path) {
  Reader r(el, path, {"kind", "image", "width", "height"});
  DimensionalSpace space;
  auto kind = space_kind_from_string(r.req("kind"));
  if (!kind) violation(path, "unknown space kind");
  space.kind = *kind;
  space.image_url = r.opt("image");
  space.width = r.opt_number("width");
  space.height = r.opt_number("height");
  size_t index = 0;
  for (const auto& c : el.children) {
    if (c->name == "poi") {
      space.pois.push_back(read_poi(*c, child_path(path, "poi", key_of(*c, "id", index))));
    } else if (c->name == "link") {
      Reader lr(*c, child_path(path, "link", std::to_string(space.links.size() + 1)), {"from", "to"});
      lr.no_children();
      space.links.push_back({lr.req("from"), lr.req("to")});
    } else if (c->name == "band") {
      std::string bp = child_path(path, "band", key_of(*c, "id", index));
      Reader br(*c, bp, {"id", "label", "min", "max", "units"});
      br.no_children();
      space.bands.push_back({br.req("id"), br.str("label"), br.req_number("min"), br.req_number("max"), br.str("units")});
    } else {
      violation(path, "unexpected child <" + c->name + ">");
    }
    ++index;
  }
  return space;
}

AugmenterInstance read_augmenter(const XmlElement& el, const std::string& path) {
  Reader r(el, path, {"kind", "anchor", "position"});
  AugmenterInstance a;
  a.kind = r.req("kind");
  a.anchor = r.req("anchor");
  a.position = r.opt("position").value_or("after");
  size_t i = 0;
  for (const auto* c : r.children_named("param")) {
    std::string pp = child_path(path, "param", key_of(*c, "name", i++));
    Reader pr(*c, pp, {"name", "bind", "value"});
    pr.no_children();
    std::string bind = pr.str("bind");
    if (!bind.empty() && pr.opt("value")) violation(pp, "bound param cannot carry a literal value");
    auto binding = parse_bind_expression(bind, pr.str("value"));
    if (!binding) violation(pp, "malformed bind expression '" + bind + "'");
    a.params.emplace_back(pr.req("name"), std::move(*binding));
  }
  return a;
}

Layer read_layer(const XmlElement& el, const std::string& path) {
  Reader r(el, path, {"id", "target", "value"});
  Layer layer;
  layer.id = r.req("id");
  std::string target = r.req("target");
  if (target == "pattern") {
    layer.target.kind = LayerTarget::Kind::pattern;
  } else if (target == "url") {
    layer.target.kind = LayerTarget::Kind::url;
  } else {
    violation(path, "layer target must be 'pattern' or 'url'");
  }
  layer.target.value = r.str("value");
  size_t i = 0;
  for (const auto* c : r.children_named("augmenter")) {
    layer.augmenters.push_back(read_augmenter(*c, child_path(path, "augmenter", std::to_string(++i))));
  }
  return layer;
}

MobileAppSpec read_app(const XmlElement& root) {
  if (root.name != "mowa-app") violation(root.name, "root element must be <mowa-app>");
  const std::string path = "mowa-app";
  Reader r(root, path, {"name", "ns", "filename", "version", "locale"});
  MobileAppSpec spec;
  spec.name = r.str("name");
  spec.ns = r.str("ns");
  spec.filename = r.str("filename");
  spec.version = r.opt_int("version").value_or(1);
  if (spec.version != 1) violation(path, "unsupported version " + std::to_string(spec.version));
  spec.locale = r.opt("locale").value_or("en");

  static constexpr std::array<std::string_view, 5> kSections = {"context-types", "sensors", "space", "layers", "rules"};
  size_t next_section = 0;
  for (const auto& c : root.children) {
    auto it = std::find(kSections.begin() + static_cast<std::ptrdiff_t>(next_section), kSections.end(), c->name);
    if (it == kSections.end()) {
      bool known = std::find(kSections.begin(), kSections.end(), c->name) != kSections.end();
      violation(path, known ? "<" + c->name + "> is duplicated or out of order" : "unknown element <" + c->name + ">");
    }
    next_section = static_cast<size_t>(it - kSections.begin()) + 1;
    std::string sp = child_path(path, c->name, "");

    if (c->name == "context-types") {
      Reader sr(*c, sp, {});
      for (const auto* t : sr.children_named("context-type")) {
        Reader tr(*t, child_path(sp, "context-type", ""), {"kind"});
        tr.no_children();
        auto kind = context_type_from_string(tr.req("kind"));
        if (!kind) violation(tr.path(), "unknown context type");
        if (!spec.context_types.insert(*kind).second) violation(tr.path(), "duplicate context type");
      }
    } else if (c->name == "sensors") {
      Reader sr(*c, sp, {});
      size_t i = 0;
      for (const auto* s : sr.children_named("sensor")) {
        Reader tr(*s, child_path(sp, "sensor", key_of(*s, "id", i++)), {"id", "kind", "context-type", "radius-m"});
        tr.no_children();
        SensorDecl d;
        d.id = tr.req("id");
        auto kind = sensor_kind_from_string(tr.req("kind"));
        if (!kind) violation(tr.path(), "unknown sensor kind");
        d.kind = *kind;
        d.context_type = context_type_of(d.kind);
        if (auto ct = tr.opt("context-type")) {
          auto parsed = context_type_from_string(*ct);
          if (!parsed) violation(tr.path(), "unknown context type");
          d.context_type = *parsed;
        }
        if (auto radius = tr.opt_number("radius-m")) {
          if (d.kind != SensorKind::gps) violation(tr.path(), "radius-m applies to gps sensors only");
          d.radius_m = *radius;
        }
        spec.sensors.push_back(std::move(d));
      }
    } else if (c->name == "space") {
      spec.space = read_space(*c, sp);
    } else if (c->name == "layers") {
      Reader sr(*c, sp, {});
      size_t i = 0;
      for (const auto* l : sr.children_named("layer")) {
        spec.layers.push_back(read_layer(*l, child_path(sp, "layer", key_of(*l, "id", i++))));
      }
    } else {
      Reader sr(*c, sp, {});
      size_t i = 0;
      for (const auto* rule : sr.children_named("rule")) {
        Reader rr(*rule, child_path(sp, "rule", std::to_string(++i)), {"sensor", "layer"});
        rr.no_children();
        spec.rules.push_back({rr.req("sensor"), rr.req("layer")});
      }
    }
  }

  for (const auto& rule : spec.rules) {
    if (!spec.sensor(rule.sensor_id)) throw Error("spec.dangling-reference", {{"id", rule.sensor_id}});
    if (!spec.layer(rule.layer_id)) throw Error("spec.dangling-reference", {{"id", rule.layer_id}});
  }
  if (spec.space) {
    for (const auto& link : spec.space->links) {
      if (!spec.space->poi(link.from)) throw Error("spec.dangling-reference", {{"id", link.from}});
      if (!spec.space->poi(link.to)) throw Error("spec.dangling-reference", {{"id", link.to}});
    }
  }
  return spec;
}

// --- canonical writer ------------------------------------------------------

std::string format_number(double d) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, ptr);
}

void escape_attr(std::string& out, std::string_view s) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default: out += c;
    }
  }
}

class Writer {
 public:
  using Attrs = std::vector<std::pair<std::string, std::string>>;

  void open(int depth, std::string_view name, Attrs attrs, bool empty) {
    indent(depth);
    out_ += '<';
    out_ += name;
    std::sort(attrs.begin(), attrs.end());
    for (const auto& [k, v] : attrs) {
      out_ += ' ';
      out_ += k;
      out_ += "=\"";
      escape_attr(out_, v);
      out_ += '"';
    }
    out_ += empty ? "/>\n" : ">\n";
  }

  void close(int depth, std::string_view name) {
    indent(depth);
    out_ += "</";
    out_ += name;
    out_ += ">\n";
  }

  std::string take() { return std::move(out_); }

 private:
  void indent(int depth) { out_.append(static_cast<size_t>(depth) * 2, ' '); }
  std::string out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
};

void write_prop(Writer& w, const Property& p) {
  Writer::Attrs a{{"name", p.name}};
  if (const auto* lit = std::get_if<LiteralValue>(&p.source)) {
    a.emplace_back("source", "literal");
    a.emplace_back("value", lit->value);
  } else {
    const auto& ex = std::get<ExtractSource>(p.source);
    a.emplace_back("source", "extract");
    a.emplace_back("url", ex.url);
    a.emplace_back("xpath", ex.xpath);
    a.emplace_back("mode", ex.mode.str());
  }
  w.open(3, "prop", std::move(a), true);
}

void write_space(Writer& w, const DimensionalSpace& s) {
  Writer::Attrs a{{"kind", std::string(to_string(s.kind))}};
  if (s.image_url) a.emplace_back("image", *s.image_url);
  if (s.width) a.emplace_back("width", format_number(*s.width));
  if (s.height) a.emplace_back("height", format_number(*s.height));
  bool empty = s.pois.empty() && s.links.empty() && s.bands.empty();
  w.open(1, "space", std::move(a), empty);
  if (empty) return;
  for (const auto& p : s.pois) {
    Writer::Attrs pa{{"id", p.id}, {"name", p.name}, {"x", format_number(p.position.x)},
                     {"y", format_number(p.position.y)}, {"target-url", p.target_url}};
    if (p.position.z) pa.emplace_back("z", format_number(*p.position.z));
    if (p.order) pa.emplace_back("order", std::to_string(*p.order));
    if (p.code) pa.emplace_back("code", *p.code);
    w.open(2, "poi", std::move(pa), p.props.empty());
    if (p.props.empty()) continue;
    for (const auto& prop : p.props) write_prop(w, prop);
    w.close(2, "poi");
  }
  for (const auto& l : s.links) w.open(2, "link", {{"from", l.from}, {"to", l.to}}, true);
  for (const auto& b : s.bands) {
    w.open(2, "band", {{"id", b.id}, {"label", b.label}, {"min", format_number(b.min)},
                       {"max", format_number(b.max)}, {"units", b.units}}, true);
  }
  w.close(1, "space");
}

void write_layers(Writer& w, const std::vector<Layer>& layers) {
  w.open(1, "layers", {}, layers.empty());
  if (layers.empty()) return;
  for (const auto& l : layers) {
    Writer::Attrs la{{"id", l.id},
                     {"target", l.target.kind == LayerTarget::Kind::pattern ? "pattern" : "url"},
                     {"value", l.target.value}};
    w.open(2, "layer", std::move(la), l.augmenters.empty());
    if (l.augmenters.empty()) continue;
    for (const auto& a : l.augmenters) {
      w.open(3, "augmenter", {{"kind", a.kind}, {"anchor", a.anchor}, {"position", a.position}}, a.params.empty());
      if (a.params.empty()) continue;
      for (const auto& [name, binding] : a.params) {
        Writer::Attrs pa{{"name", name}};
        if (const auto* lit = std::get_if<LiteralValue>(&binding)) {
          pa.emplace_back("value", lit->value);
        } else {
          pa.emplace_back("bind", bind_expression(binding));
        }
        w.open(4, "param", std::move(pa), true);
      }
      w.close(3, "augmenter");
    }
    w.close(2, "layer");
  }
  w.close(1, "layers");
}

}  // namespace

MobileAppSpec parse_spec(std::string_view xml) { return read_app(*build_tree(xml)); }

std::string serialize_spec_unchecked(const MobileAppSpec& spec) {
  Writer w;
  w.open(0, "mowa-app",
         {{"name", spec.name}, {"ns", spec.ns}, {"filename", spec.filename},
          {"version", std::to_string(spec.version)}, {"locale", spec.locale}},
         false);

  w.open(1, "context-types", {}, spec.context_types.empty());
  if (!spec.context_types.empty()) {
    for (auto t : spec.context_types) w.open(2, "context-type", {{"kind", std::string(to_string(t))}}, true);
    w.close(1, "context-types");
  }

  w.open(1, "sensors", {}, spec.sensors.empty());
  if (!spec.sensors.empty()) {
    for (const auto& s : spec.sensors) {
      Writer::Attrs a{{"id", s.id}, {"kind", std::string(to_string(s.kind))},
                      {"context-type", std::string(to_string(s.context_type))}};
      if (s.kind == SensorKind::gps) a.emplace_back("radius-m", format_number(s.radius_m));
      w.open(2, "sensor", std::move(a), true);
    }
    w.close(1, "sensors");
  }

  if (spec.space) write_space(w, *spec.space);
  write_layers(w, spec.layers);

  w.open(1, "rules", {}, spec.rules.empty());
  if (!spec.rules.empty()) {
    for (const auto& r : spec.rules) w.open(2, "rule", {{"sensor", r.sensor_id}, {"layer", r.layer_id}}, true);
    w.close(1, "rules");
  }
  w.close(0, "mowa-app");
  return w.take();
}

std::string serialize_spec(const MobileAppSpec& spec) {
  auto report = validate_spec(spec);
  if (!report.ok) {
    Error::Args args;
    for (const auto& issue : report.issues) {
      if (issue.severity == Severity::error) {
        args.emplace("first", issue.key);
        break;
      }
    }
    throw Error("spec.invalid", std::move(args));
  }
  return serialize_spec_unchecked(spec);
}

}  // namespace mowa
