#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mowa/binding.hpp"
#include "mowa/html.hpp"
#include "mowa/spec.hpp"
#include "mowa/tour.hpp"

namespace mowa::augmenters {

struct ParamDecl {
  std::string name;
  std::string description;
};

struct AugmenterKind {
  std::string id;
  std::vector<ParamDecl> required_params;
  std::vector<ParamDecl> optional_params;
  std::set<ContextType> compatible_context_types;
  bool renders_tour_state = false;
  // Requires one `volume:<band-id>` param per band of the space.
  bool per_band_params = false;
};

inline constexpr std::string_view kPoiInfoPanel = "poi-info-panel";
inline constexpr std::string_view kHypermediaNav = "hypermedia-nav";
inline constexpr std::string_view kScalarBadge = "scalar-badge";
inline constexpr std::string_view kMediaVolumeAdapter = "media-volume-adapter";
inline constexpr std::string_view kTextInjector = "text-injector";
inline constexpr std::string_view kVolumeParamPrefix = "volume:";

const std::vector<AugmenterKind>& catalog();
const AugmenterKind* find_kind(std::string_view id);

// Kinds whose compatible set intersects `selected`, in catalog order.
std::vector<const AugmenterKind*> suggest(const std::set<ContextType>& selected);

// Every parameter name an instance of `kind` must bind, given the space.
std::vector<std::string> required_param_names(const AugmenterKind& kind, const std::optional<DimensionalSpace>& space);

using ResolvedParams = std::map<std::string, std::string>;

// Active scalar value of interest (band or orientation mode) for rendering.
struct ActiveBand {
  std::string id;
  std::string label;
};

struct RenderInput {
  std::string layer_id;
  ResolvedParams params;
  const TourState* tour = nullptr;
  std::optional<ActiveBand> band;
  std::string locale = "en";
};

// Attribute writes an augmenter performs on existing page nodes.
struct AttributeEdit {
  std::string xpath;
  std::string name;
  std::string value;
};

struct Rendered {
  html::Fragment fragment;
  std::vector<AttributeEdit> edits;
};

// Throws Error("augmenter.param-missing") or Error("augmenter.tour-missing").
Rendered render(const AugmenterKind& kind, const RenderInput& input);

struct BindingContext {
  const MobileAppSpec* spec = nullptr;
  const PointOfInterest* poi = nullptr;
  std::optional<ActiveBand> band;
  const TourState* tour = nullptr;
  ExtractCache* cache = nullptr;
};

struct ApplyWarning {
  std::string key;
  std::string detail;
};

struct ApplyResult {
  html::Document doc;
  int augmenters_applied = 0;
  std::vector<ApplyWarning> warnings;
};

// Strips the layer's previous output, then resolves, renders and inserts each
// augmenter in order. Anchor misses become warnings. Any binding or render
// error propagates and leaves the input untouched.
ApplyResult apply_layer(const html::Document& doc, const Layer& layer, const BindingContext& ctx);

}  // namespace mowa::augmenters
