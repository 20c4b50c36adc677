#include "mowa/augmenters.hpp"

#include <algorithm>

#include "mowa/binding.hpp"
#include "mowa/error.hpp"
#include "mowa/i18n.hpp"
#include "mowa/xpath.hpp"

namespace mowa::augmenters {
namespace {

using html::Node;

std::vector<AugmenterKind> build_catalog() {
  const std::set<ContextType> scalar{ContextType::light, ContextType::noise, ContextType::time,
                                     ContextType::orientation};
  const std::set<ContextType> all{ContextType::location, ContextType::orientation, ContextType::light,
                                  ContextType::noise, ContextType::time};
  return {
      {std::string(kPoiInfoPanel),
       {{"title", "Heading shown above the panel"},
        {"description", "Paragraph describing the point of interest"},
        {"image-url", "Picture of the point of interest"}},
       {},
       {ContextType::location},
       false,
       false},
      {std::string(kHypermediaNav), {}, {}, {ContextType::location}, true, false},
      {std::string(kScalarBadge), {{"label-prefix", "Text placed before the current band label"}}, {}, scalar, false, false},
      {std::string(kMediaVolumeAdapter),
       {{"media-xpath", "XPath selecting the media elements to adapt"}},
       {},
       {ContextType::noise},
       false,
       true},
      {std::string(kTextInjector), {{"text", "Text to inject"}}, {}, all, false, false},
  };
}

std::unique_ptr<Node> el(std::string tag, std::vector<html::Attribute> attrs = {}) {
  return Node::element(std::move(tag), std::move(attrs));
}

Node* add_text_child(Node* parent, std::string text) {
  parent->append_child(Node::text(std::move(text)));
  return parent;
}

const std::string& param(const RenderInput& in, const std::string& name) {
  auto it = in.params.find(name);
  if (it == in.params.end()) throw Error("augmenter.param-missing", {{"name", name}});
  return it->second;
}

const ActiveBand& active_band(const RenderInput& in, std::string_view kind) {
  if (!in.band) throw Error("augmenter.band-missing", {{"kind", std::string(kind)}});
  return *in.band;
}

std::vector<std::unique_ptr<Node>> render_info_panel(const RenderInput& in) {
  const std::string& title = param(in, "title");
  auto panel = el("div", {{"class", "mowa-poi-info"}});
  add_text_child(panel->append_child(el("h2", {{"class", "mowa-poi-title"}})), title);
  add_text_child(panel->append_child(el("p", {{"class", "mowa-poi-desc"}})), param(in, "description"));
  panel->append_child(el("img", {{"class", "mowa-poi-pic"}, {"src", param(in, "image-url")}, {"alt", title}}));
  std::vector<std::unique_ptr<Node>> out;
  out.push_back(std::move(panel));
  return out;
}

std::vector<std::unique_ptr<Node>> render_nav(const RenderInput& in) {
  if (!in.tour) throw Error("augmenter.tour-missing");
  const TourState& tour = *in.tour;
  const std::string total = std::to_string(tour.ordered_pois.size());
  const std::string visited = std::to_string(tour.visited.size());

  auto box = el("div");
  std::string mode(to_string(tour.mode));
  std::replace(mode.begin(), mode.end(), '_', '-');
  box->set_attribute("class", "mowa-nav mowa-nav-" + mode);

  const TourStop* expected = tour.expected();
  if (tour.mode == TourMode::complete || !expected) {
    box->set_attribute("data-mowa-mode", "complete");
    add_text_child(box->append_child(el("p", {{"class", "mowa-nav-complete"}})),
                   i18n::message("render.nav.complete", {{"total", total}}, in.locale));
  } else if (tour.mode == TourMode::wrong_piece) {
    box->set_attribute("data-mowa-mode", "wrong_piece");
    box->set_attribute("data-mowa-expected", expected->id);
    Node* p = box->append_child(el("p", {{"class", "mowa-nav-wrong"}}));
    add_text_child(p, i18n::message("render.nav.wrong-label", {}, in.locale));
    add_text_child(p->append_child(el("strong", {{"class", "mowa-expected"}, {"data-mowa-poi", expected->id}})),
                   expected->name);
  } else {
    box->set_attribute("data-mowa-mode", std::string(to_string(tour.mode)));
    box->set_attribute("data-mowa-expected", expected->id);
    bool started = tour.mode == TourMode::on_track;
    Node* p = box->append_child(el("p", {{"class", "mowa-nav-next"}}));
    add_text_child(p, i18n::message(started ? "render.nav.next-label" : "render.nav.start-label", {}, in.locale));
    add_text_child(p->append_child(el("a", {{"class", "mowa-walk"}, {"data-mowa-walk", expected->id}})),
                   expected->name);
  }
  add_text_child(box->append_child(el("p", {{"class", "mowa-nav-progress"}})),
                 i18n::message("render.nav.progress", {{"visited", visited}, {"total", total}}, in.locale));
  std::vector<std::unique_ptr<Node>> out;
  out.push_back(std::move(box));
  return out;
}

std::vector<std::unique_ptr<Node>> render_badge(const RenderInput& in) {
  const auto& band = active_band(in, kScalarBadge);
  auto badge = el("span", {{"class", "mowa-badge"}, {"data-mowa-band", band.id}});
  add_text_child(badge.get(), param(in, "label-prefix") + band.label);
  std::vector<std::unique_ptr<Node>> out;
  out.push_back(std::move(badge));
  return out;
}

std::vector<std::unique_ptr<Node>> render_text(const RenderInput& in) {
  auto box = el("div", {{"class", "mowa-text"}});
  add_text_child(box.get(), param(in, "text"));
  std::vector<std::unique_ptr<Node>> out;
  out.push_back(std::move(box));
  return out;
}

}  // namespace

const std::vector<AugmenterKind>& catalog() {
  static const std::vector<AugmenterKind> kCatalog = build_catalog();
  return kCatalog;
}

const AugmenterKind* find_kind(std::string_view id) {
  const auto& cat = catalog();
  auto it = std::find_if(cat.begin(), cat.end(), [&](const AugmenterKind& k) { return k.id == id; });
  return it == cat.end() ? nullptr : &*it;
}

std::vector<const AugmenterKind*> suggest(const std::set<ContextType>& selected) {
  std::vector<const AugmenterKind*> out;
  for (const auto& k : catalog()) {
    bool hit = std::any_of(k.compatible_context_types.begin(), k.compatible_context_types.end(),
                           [&](ContextType t) { return selected.count(t) > 0; });
    if (hit) out.push_back(&k);
  }
  return out;
}

std::vector<std::string> required_param_names(const AugmenterKind& kind, const std::optional<DimensionalSpace>& space) {
  std::vector<std::string> out;
  for (const auto& p : kind.required_params) out.push_back(p.name);
  if (kind.per_band_params && space) {
    for (const auto& b : space->bands) out.push_back(std::string(kVolumeParamPrefix) + b.id);
  }
  return out;
}

Rendered render(const AugmenterKind& kind, const RenderInput& input) {
  Rendered out;
  std::vector<std::unique_ptr<Node>> nodes;
  if (kind.id == kPoiInfoPanel) {
    nodes = render_info_panel(input);
  } else if (kind.id == kHypermediaNav) {
    nodes = render_nav(input);
  } else if (kind.id == kScalarBadge) {
    nodes = render_badge(input);
  } else if (kind.id == kTextInjector) {
    nodes = render_text(input);
  } else if (kind.id == kMediaVolumeAdapter) {
    const auto& band = active_band(input, kind.id);
    const std::string& media = param(input, "media-xpath");
    const std::string& volume = param(input, std::string(kVolumeParamPrefix) + band.id);
    out.edits.push_back({media, "data-mowa-volume", volume});
    out.edits.push_back({media, "data-mowa-band", band.id});
  } else {
    throw Error("augmenter.kind-unknown", {{"kind", kind.id}});
  }
  out.fragment = html::make_fragment(input.layer_id, kind.id, std::move(nodes));
  return out;
}

ApplyResult apply_layer(const html::Document& doc, const Layer& layer, const BindingContext& ctx) {
  if (!ctx.spec) throw Error("augmenter.no-spec");
  ApplyResult result{doc, 0, {}};
  html::Document& out = result.doc;
  html::strip_augmentations(out, layer.id);

  for (size_t i = 0; i < layer.augmenters.size(); ++i) {
    const auto& inst = layer.augmenters[i];
    const AugmenterKind* kind = find_kind(inst.kind);
    if (!kind) throw Error("augmenter.kind-unknown", {{"kind", inst.kind}});
    auto position = html::position_from_string(inst.position);
    if (!position) throw Error("augmenter.position-invalid", {{"position", inst.position}});

    RenderInput in;
    in.layer_id = layer.id;
    in.band = ctx.band;
    in.locale = ctx.spec->locale;
    if (kind->renders_tour_state) in.tour = ctx.tour;
    for (const auto& [name, binding] : inst.params) {
      in.params[name] = resolve_binding(*ctx.spec, binding, ctx.poi, ctx.cache);
    }

    auto anchors = xpath::select(out, xpath::Expr::parse(inst.anchor));
    if (anchors.empty()) {
      result.warnings.push_back({"anchor.miss", layer.id + ": " + inst.kind + " @ " + inst.anchor});
      continue;
    }
    Rendered rendered = render(*kind, in);
    html::insert_fragment(out, *anchors.front(), *position, rendered.fragment);
    for (const auto& edit : rendered.edits) {
      for (html::Node* target : xpath::select(out, xpath::Expr::parse(edit.xpath))) {
        if (!target->is_element()) continue;
        target->set_attribute(edit.name, edit.value);
        target->set_attribute(html::kEditAttr, layer.id);
      }
    }
    ++result.augmenters_applied;
  }
  return result;
}

}  // namespace mowa::augmenters
