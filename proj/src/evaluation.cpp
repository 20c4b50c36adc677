#include "mowa/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>

#include "mowa/augmenters.hpp"
#include "mowa/binding.hpp"
#include "mowa/error.hpp"
#include "mowa/hash.hpp"
#include "mowa/spec_xml.hpp"
#include "mowa/url.hpp"
#include "mowa/validate.hpp"
#include "mowa/xpath.hpp"

namespace mowa::eval {
namespace {

using nlohmann::json;

std::string fmt(double v, int digits = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, round_half_away(v, digits));
  return buf;
}

void check_unit(const char* name, double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw Error("eval.domain", {{"name", name}, {"value", std::to_string(v)}});
}

std::string fold(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(b, e - b + 1));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool same_url(std::string_view a, std::string_view b) {
  auto na = url::normalize(a);
  auto nb = url::normalize(b);
  return na && nb && *na == *nb;
}

template <typename F>
std::optional<std::string> attempt(F&& f) {
  try {
    return f();
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Reference PoI id -> candidate PoI. Pairs by code, then URL, then name.
std::map<std::string, const PointOfInterest*> pair_pois(const MobileAppSpec& ref, const MobileAppSpec& cand) {
  std::map<std::string, const PointOfInterest*> out;
  if (!ref.space || !cand.space) return out;
  std::set<const PointOfInterest*> used;
  auto pass = [&](auto&& same) {
    for (const auto& rp : ref.space->pois) {
      if (out.count(rp.id)) continue;
      for (const auto& cp : cand.space->pois) {
        if (used.count(&cp) || !same(rp, cp)) continue;
        out[rp.id] = &cp;
        used.insert(&cp);
        break;
      }
    }
  };
  pass([](const PointOfInterest& r, const PointOfInterest& c) { return r.code && c.code && *r.code == *c.code; });
  pass([](const PointOfInterest& r, const PointOfInterest& c) { return same_url(r.target_url, c.target_url); });
  pass([](const PointOfInterest& r, const PointOfInterest& c) { return !fold(r.name).empty() && fold(r.name) == fold(c.name); });
  return out;
}

double diagonal(const DimensionalSpace& space) {
  if (space.width && space.height) return std::hypot(*space.width, *space.height);
  if (space.pois.empty()) return 1;
  double x0 = space.pois[0].position.x, x1 = x0, y0 = space.pois[0].position.y, y1 = y0;
  for (const auto& p : space.pois) {
    x0 = std::min(x0, p.position.x);
    x1 = std::max(x1, p.position.x);
    y0 = std::min(y0, p.position.y);
    y1 = std::max(y1, p.position.y);
  }
  double d = std::hypot(x1 - x0, y1 - y0);
  return d > 0 ? d : 1;
}

bool prop_matches(const Property* ref, const Property* cand, ExtractCache* cache) {
  if (!ref || !cand) return false;
  auto rv = attempt([&] { return resolve_property(ref->source, cache); });
  auto cv = attempt([&] { return resolve_property(cand->source, cache); });
  if (rv && cv) return *rv == *cv;
  if (!rv) return ref->source == cand->source;
  return false;
}

// First augmenter of `kind` among the spec's layers that would run on the
// page of `poi`.
const AugmenterInstance* augmenter_on_page(const MobileAppSpec& spec, const PointOfInterest* poi,
                                           std::string_view page_url, std::string_view kind) {
  auto page = url::normalize_or_keep(page_url);
  for (const auto& layer : spec.layers) {
    bool hits = false;
    if (layer.target.kind == LayerTarget::Kind::pattern) {
      hits = url::glob_match(layer.target.value, page);
    } else if (layer.target.value == kPoiTargetUrlToken) {
      hits = poi && url::normalize_or_keep(poi->target_url) == page;
    } else {
      hits = url::normalize_or_keep(layer.target.value) == page;
    }
    if (!hits) continue;
    for (const auto& a : layer.augmenters) {
      if (a.kind == kind) return &a;
    }
  }
  return nullptr;
}

bool same_anchor(const AugmenterInstance& ref, const AugmenterInstance& cand, const std::optional<html::Document>& page) {
  if (ref.position != cand.position) return false;
  if (!xpath::Expr::valid(cand.anchor) || !xpath::Expr::valid(ref.anchor)) return false;
  auto re = xpath::Expr::parse(ref.anchor);
  auto ce = xpath::Expr::parse(cand.anchor);
  if (re == ce) return true;
  if (!page) return false;
  auto rn = xpath::select(*page, re);
  auto cn = xpath::select(*page, ce);
  return !rn.empty() && !cn.empty() && rn.front() == cn.front();
}

bool params_match(const MobileAppSpec& ref_spec, const AugmenterInstance& ref, const PointOfInterest* ref_poi,
                  const MobileAppSpec& cand_spec, const AugmenterInstance& cand, const PointOfInterest* cand_poi,
                  ExtractCache* cache) {
  for (const auto& [name, rb] : ref.params) {
    const Binding* cb = cand.param(name);
    if (!cb) return false;
    auto rv = attempt([&] { return resolve_binding(ref_spec, rb, ref_poi, cache); });
    auto cv = attempt([&] { return resolve_binding(cand_spec, *cb, cand_poi, cache); });
    if (rv && cv) {
      if (*rv != *cv) return false;
    } else if (rv || !(rb == *cb)) {
      return false;
    }
  }
  return true;
}

}  // namespace

double round_half_away(double x, int digits) {
  double scale = std::pow(10.0, digits);
  return std::round(x * scale + std::copysign(1e-7, x)) / scale;
}

double sr(double a, double b, double c, double d, double e) {
  check_unit("a", a);
  check_unit("b", b);
  check_unit("c", c);
  check_unit("d", d);
  check_unit("e", e);
  return ((a + b) / 2 + 2 * (c + d + e) / 3) / 3;
}

GradeReport GradeReport::from_cells(double a, double b, double c, double d, double e, std::string participant) {
  GradeReport r;
  r.participant = std::move(participant);
  r.sr = eval::sr(a, b, c, d, e);
  r.a = a;
  r.b = b;
  r.c = c;
  r.d = d;
  r.e = e;
  r.r1 = (a + b) / 2;
  r.r23 = (c + d + e) / 3;
  return r;
}

json GradeReport::to_json() const {
  json j;
  if (!participant.empty()) j["participant"] = participant;
  j["a"] = a;
  j["b"] = b;
  j["c"] = c;
  j["d"] = d;
  j["e"] = e;
  j["r1"] = r1;
  j["r23"] = r23;
  j["sr"] = sr;
  j["display"] = {{"r1", fmt(r1)}, {"r23", fmt(r23)}, {"sr", fmt(sr)}};
  return j;
}

GradeReport GradeReport::from_json(const json& j) {
  auto cell = [&](const char* k) {
    if (!j.is_object() || !j.contains(k) || !j[k].is_number()) {
      throw Error("payload.invalid", {{"detail", std::string("report needs number '") + k + "'"}});
    }
    return j[k].get<double>();
  };
  try {
    return from_cells(cell("a"), cell("b"), cell("c"), cell("d"), cell("e"), j.value("participant", ""));
  } catch (const json::exception& e) {
    throw Error("payload.invalid", {{"detail", e.what()}});
  }
}

Rubric Rubric::load(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error("rubric.invalid", {{"detail", e.what()}});
  }
  Rubric r;
  try {
    auto ref = std::filesystem::path(path).parent_path() / j.at("reference").get<std::string>();
    r.reference = parse_spec(read_file(ref.string()));
    r.expected_poi_count = j.value("expected_poi_count", r.expected_poi_count);
    r.expected_link_count = j.value("expected_link_count", r.expected_link_count);
    if (j.contains("required_props")) r.required_props = j["required_props"].get<std::vector<std::string>>();
    r.tolerance = j.value("tolerance", r.tolerance);
  } catch (const json::exception& e) {
    throw Error("rubric.invalid", {{"detail", e.what()}});
  }
  r.check();
  return r;
}

void Rubric::check() const {
  auto fail = [](std::string d) { throw Error("rubric.invalid", {{"detail", std::move(d)}}); };
  if (expected_poi_count <= 0 || expected_link_count < 0) fail("counts must be positive");
  if (!(tolerance > 0 && tolerance < 1)) fail("tolerance must lie in (0, 1)");
  auto report = validate_spec(reference);
  if (!report.ok) fail("reference spec does not validate");
  if (!reference.space || static_cast<int>(reference.space->pois.size()) != expected_poi_count) {
    fail("reference has a different number of points of interest");
  }
  if (static_cast<int>(reference.space->links.size()) != expected_link_count) {
    fail("reference has a different number of links");
  }
  for (const auto& p : reference.space->pois) {
    for (const auto& name : required_props) {
      if (!p.prop(name)) fail("reference " + p.id + " lacks " + name);
    }
  }
}

GradeReport grade(const MobileAppSpec& candidate, const Rubric& rubric, const GradeOptions& options) {
  rubric.check();
  const MobileAppSpec& ref = rubric.reference;
  const auto& ref_pois = ref.space->pois;
  auto pairs = pair_pois(ref, candidate);
  const double reach = rubric.tolerance * diagonal(*ref.space);

  int cells = 0, cells_ok = 0;
  double b_sum = 0, c_sum = 0;
  int d_ok = 0;
  for (const auto& rp : ref_pois) {
    auto it = pairs.find(rp.id);
    const PointOfInterest* cp = it == pairs.end() ? nullptr : it->second;

    bool placed = cp && std::hypot(cp->position.x - rp.position.x, cp->position.y - rp.position.y) <= reach;
    bool name_ok = cp && fold(cp->name) == fold(rp.name) && !fold(rp.name).empty();
    bool url_ok = cp && same_url(cp->target_url, rp.target_url);
    cells += 2 + static_cast<int>(rubric.required_props.size());
    cells_ok += (placed && name_ok) + (placed && url_ok);
    for (const auto& prop : rubric.required_props) {
      cells_ok += placed && cp && prop_matches(rp.prop(prop), cp->prop(prop), options.cache);
    }
    d_ok += name_ok && url_ok;

    std::optional<html::Document> page;
    if (options.corpus) page = options.corpus->page(rp.target_url);

    const auto* ref_panel = augmenter_on_page(ref, &rp, rp.target_url, augmenters::kPoiInfoPanel);
    const auto* cand_panel = augmenter_on_page(candidate, cp, rp.target_url, augmenters::kPoiInfoPanel);
    if (ref_panel && cand_panel) {
      int positioned = same_anchor(*ref_panel, *cand_panel, page);
      int configured = params_match(ref, *ref_panel, &rp, candidate, *cand_panel, cp, options.cache);
      b_sum += (positioned + configured) / 2.0;
    }
    const auto* ref_nav = augmenter_on_page(ref, &rp, rp.target_url, augmenters::kHypermediaNav);
    const auto* cand_nav = augmenter_on_page(candidate, cp, rp.target_url, augmenters::kHypermediaNav);
    if (ref_nav && cand_nav && same_anchor(*ref_nav, *cand_nav, page)) c_sum += 1;
  }

  int links_ok = 0;
  if (candidate.space) {
    std::set<std::pair<std::string, std::string>> have;
    for (const auto& l : candidate.space->links) have.emplace(l.from, l.to);
    for (const auto& l : ref.space->links) {
      auto f = pairs.find(l.from);
      auto t = pairs.find(l.to);
      if (f != pairs.end() && t != pairs.end() && have.count({f->second->id, t->second->id})) ++links_ok;
    }
  }

  const double n = static_cast<double>(ref_pois.size());
  double e = rubric.expected_link_count == 0 ? 1.0
                                             : std::min(1.0, links_ok / static_cast<double>(rubric.expected_link_count));
  return GradeReport::from_cells(cells ? static_cast<double>(cells_ok) / cells : 0, b_sum / n, c_sum / n, d_ok / n, e);
}

Stats cohort_stats(const std::vector<double>& values) {
  if (values.size() < 2) throw Error("stats.too-few", {{"min", "2"}});
  Stats s;
  s.n = values.size();
  double mean = 0, m2 = 0;
  size_t k = 0;
  for (double v : values) {
    ++k;
    double delta = v - mean;
    mean += delta / k;
    m2 += delta * (v - mean);
  }
  s.mean = mean;
  s.sample_std = std::sqrt(m2 / (s.n - 1));
  return s;
}

double binomial_upper_tail(int k, int n) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  // Sum C(n, j) / 2^n from j = n down to k; terms built by the ratio
  // C(n, j-1) = C(n, j) * j / (n - j + 1).
  long double term = std::ldexp(1.0L, -n);
  long double sum = term;
  for (int j = n; j > k; --j) {
    term = term * j / (n - j + 1);
    sum += term;
  }
  return static_cast<double>(std::min(sum, 1.0L));
}

SignTestResult sign_test(const std::vector<double>& values, double median, double alpha) {
  if (values.empty()) throw Error("stats.too-few", {{"min", "1"}});
  SignTestResult r;
  r.hypothesized_median = median;
  r.alpha = alpha;
  for (double v : values) {
    if (std::abs(v - median) < kTieEpsilon) ++r.n_equal;
    else if (v > median) ++r.n_above;
    else ++r.n_below;
  }
  int n = r.n_above + r.n_below;
  if (n == 0) throw Error("stats.all-ties");
  r.p_value = binomial_upper_tail(r.n_above, n);
  r.reject = r.p_value < alpha;
  return r;
}

std::string format_table(const std::vector<GradeReport>& reports) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-5s %5s %5s %5s %5s %5s %5s %5s %5s\n", "PS.", "a", "b", "R1", "c", "d", "e",
                "R2&3", "SR");
  out += line;
  double s1 = 0, s23 = 0, ssr = 0;
  for (size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    std::string ps = r.participant.empty() ? std::to_string(i + 1) : r.participant;
    std::snprintf(line, sizeof line, "%-5s %5s %5s %5s %5s %5s %5s %5s %5s\n", ps.c_str(), fmt(r.a).c_str(),
                  fmt(r.b).c_str(), fmt(r.r1).c_str(), fmt(r.c).c_str(), fmt(r.d).c_str(), fmt(r.e).c_str(),
                  fmt(r.r23).c_str(), fmt(r.sr).c_str());
    out += line;
    s1 += r.r1;
    s23 += r.r23;
    ssr += r.sr;
  }
  if (!reports.empty()) {
    double n = static_cast<double>(reports.size());
    std::snprintf(line, sizeof line, "%-5s %5s %5s %5s %5s %5s %5s %5s %5s\n", "%", "", "", fmt(s1 / n).c_str(), "", "",
                  "", fmt(s23 / n).c_str(), fmt(ssr / n).c_str());
    out += line;
  }
  return out;
}

}  // namespace mowa::eval
