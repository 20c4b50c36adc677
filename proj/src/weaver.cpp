#include "mowa/weaver.hpp"

#include <json.hpp>

#include "mowa/error.hpp"
#include "mowa/hash.hpp"
#include "mowa/url.hpp"
#include "mowa/validate.hpp"

namespace mowa {
namespace fs = std::filesystem;
using nlohmann::json;

PageCorpus PageCorpus::load(const fs::path& dir) {
  PageCorpus c;
  c.dir_ = dir;
  fs::path manifest = dir / "manifest.json";
  json j;
  try {
    j = json::parse(read_file(manifest.string()));
  } catch (const std::exception& e) {
    throw Error("corpus.broken", {{"detail", manifest.string() + ": " + e.what()}});
  }
  if (!j.is_object()) throw Error("corpus.broken", {{"detail", "manifest is not an object"}});
  for (const auto& [raw, path] : j.items()) {
    auto key = url::normalize(raw);
    if (!key || !path.is_string()) throw Error("corpus.broken", {{"detail", "bad entry " + raw}, {"url", raw}});
    if (!fs::is_regular_file(dir / path.get<std::string>())) {
      throw Error("corpus.broken", {{"detail", "missing page for " + raw}, {"url", raw}});
    }
    c.files_[*key] = path.get<std::string>();
  }
  return c;
}

bool PageCorpus::contains(std::string_view raw) const {
  std::string key = url::normalize_or_keep(raw);
  return files_.count(key) > 0 || inline_.count(key) > 0;
}

std::vector<std::string> PageCorpus::urls() const {
  std::vector<std::string> out;
  for (const auto& [u, f] : files_) out.push_back(u);
  for (const auto& [u, b] : inline_) {
    if (!files_.count(u)) out.push_back(u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void PageCorpus::add(std::string raw, std::string bytes) {
  std::string key = url::normalize_or_keep(raw);
  std::lock_guard lock(*mu_);
  parsed_.erase(key);
  inline_[key] = std::move(bytes);
}

std::optional<html::Document> PageCorpus::page(std::string_view raw) const {
  std::string key = url::normalize_or_keep(raw);
  std::lock_guard lock(*mu_);
  if (auto it = parsed_.find(key); it != parsed_.end()) return *it->second;
  std::string bytes;
  if (auto it = inline_.find(key); it != inline_.end()) {
    bytes = it->second;
  } else if (auto f = files_.find(key); f != files_.end()) {
    bytes = read_file((dir_ / f->second).string());
  } else {
    return std::nullopt;
  }
  auto doc = std::make_shared<const html::Document>(html::parse(bytes, key));
  parsed_[key] = doc;
  return *doc;
}

std::string to_json_line(const LogEntry& entry) {
  json j;
  j["t"] = entry.t_ms;
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, log::NavLoaded>) {
          j["event"] = "nav_loaded";
          j["url"] = e.url;
        } else if constexpr (std::is_same_v<T, log::RuleFired>) {
          j["event"] = "rule_fired";
          j["sensor"] = e.sensor;
          j["layer"] = e.layer;
          j["semantic"] = e.semantic;
        } else if constexpr (std::is_same_v<T, log::LayerApplied>) {
          j["event"] = "layer_applied";
          j["layer"] = e.layer;
          j["url"] = e.url;
          j["augmenters"] = e.augmenters;
          j["warnings"] = e.warnings;
        } else if constexpr (std::is_same_v<T, log::Warning>) {
          j["event"] = "warning";
          j["key"] = e.key;
          j["detail"] = e.detail;
        } else {
          j["event"] = "snapshot";
          j["path"] = e.path;
        }
      },
      entry.event);
  return j.dump();
}

Session::Session(MobileAppSpec spec, const PageCorpus& corpus, ExtractCache* cache)
    : spec_(std::move(spec)), corpus_(&corpus), cache_(cache), tour_(start_tour(spec_)) {}

void Session::warn(std::string key, std::string detail) {
  log_.push_back({now_, log::Warning{std::move(key), std::move(detail)}});
}

bool Session::load(const std::string& raw) {
  std::string key = url::normalize_or_keep(raw);
  auto doc = corpus_->page(key);
  if (!doc) {
    warn("nav.miss", key);
    return false;
  }
  current_url_ = key;
  current_doc_ = std::move(doc);
  log_.push_back({now_, log::NavLoaded{key}});
  return true;
}

bool Session::layer_targets(const Layer& layer, const std::string& url, const PointOfInterest* poi) const {
  if (layer.target.kind == LayerTarget::Kind::pattern) return url::glob_match(layer.target.value, url);
  if (layer.target.value == kPoiTargetUrlToken) return poi && url::normalize_or_keep(poi->target_url) == url;
  return url::normalize_or_keep(layer.target.value) == url;
}

bool Session::condition_holds(const Semantic& value) const {
  if (auto* a = std::get_if<AtPoi>(&value)) return spec_.poi(a->poi_id) != nullptr;
  if (!spec_.space) return false;
  if (auto* b = std::get_if<InBand>(&value)) return spec_.space->band(b->band_id) != nullptr;
  if (auto* o = std::get_if<OrientationMode>(&value)) return spec_.space->band(to_string(o->mode)) != nullptr;
  return false;
}

Session::Binding Session::binding_for(const Semantic& value) const {
  Binding b;
  if (auto* a = std::get_if<AtPoi>(&value)) {
    b.poi = spec_.poi(a->poi_id);
  } else if (auto* in = std::get_if<InBand>(&value)) {
    const Band* band = spec_.space ? spec_.space->band(in->band_id) : nullptr;
    b.band = augmenters::ActiveBand{in->band_id, band ? band->label : in->band_id};
  } else if (auto* o = std::get_if<OrientationMode>(&value)) {
    std::string id(to_string(o->mode));
    const Band* band = spec_.space ? spec_.space->band(id) : nullptr;
    b.band = augmenters::ActiveBand{id, band ? band->label : id};
  }
  return b;
}

void Session::apply(const Layer& layer, const Binding& binding) {
  if (!current_doc_) {
    warn("weave.no-page", "layer " + layer.id);
    return;
  }
  augmenters::BindingContext ctx{&spec_, binding.poi, binding.band, &tour_, cache_};
  augmenters::ApplyResult result;
  try {
    result = augmenters::apply_layer(*current_doc_, layer, ctx);
  } catch (const Error& e) {
    warn(e.key(), layer.id + ": " + e.what());
    return;
  }
  current_doc_ = std::move(result.doc);
  for (auto& w : result.warnings) warn(w.key, w.detail);
  log_.push_back({now_, log::LayerApplied{layer.id, *current_url_, result.augmenters_applied,
                                          static_cast<int>(result.warnings.size())}});

  std::string base = std::to_string(now_) + "-" + layer.id;
  std::string name = base + ".html";
  for (int n = 2; std::any_of(snapshots_.begin(), snapshots_.end(), [&](const PageSnapshot& s) { return s.name == name; });
       ++n) {
    name = base + "-" + std::to_string(n) + ".html";
  }
  snapshots_.push_back({now_, layer.id, name, html::serialize(*current_doc_)});
  log_.push_back({now_, log::Snapshot{name}});
}

void Session::handle_nav(const std::string& url) {
  if (!load(url)) return;
  for (const auto& layer : spec_.layers) {
    bool conditioned = false;
    for (const auto& rule : spec_.rules) {
      if (rule.layer_id != layer.id) continue;
      conditioned = true;
      if (layer.target.kind != LayerTarget::Kind::pattern) break;
      auto it = sensor_state_.last.find(rule.sensor_id);
      if (it == sensor_state_.last.end() || !condition_holds(it->second)) continue;
      if (!layer_targets(layer, *current_url_, nullptr)) break;
      log_.push_back({now_, log::RuleFired{rule.sensor_id, layer.id, describe(it->second)}});
      apply(layer, binding_for(it->second));
      break;
    }
    if (!conditioned && layer_targets(layer, *current_url_, nullptr)) apply(layer, {});
  }
}

void Session::handle_context(const ContextChange& change) {
  sensor_state_.last[change.sensor_id] = change.value;
  if (auto* a = std::get_if<AtPoi>(&change.value)) tour_.sense(a->poi_id);

  for (const auto& rule : spec_.rules) {
    if (rule.sensor_id != change.sensor_id) continue;
    const Layer* layer = spec_.layer(rule.layer_id);
    if (!layer || !condition_holds(change.value)) continue;
    log_.push_back({now_, log::RuleFired{rule.sensor_id, layer->id, describe(change.value)}});
    Binding binding = binding_for(change.value);

    if (layer->target.kind == LayerTarget::Kind::url) {
      std::string target = layer->target.value;
      if (target == kPoiTargetUrlToken) {
        if (!binding.poi) {
          warn("binding.missing-poi", layer->id);
          continue;
        }
        target = binding.poi->target_url;
      }
      if (current_url_ != url::normalize_or_keep(target)) {
        handle_nav(target);
        if (current_url_ != url::normalize_or_keep(target)) continue;
      }
    } else if (!current_url_ || !url::glob_match(layer->target.value, *current_url_)) {
      continue;
    }
    apply(*layer, binding);
  }
}

void Session::feed(const SimEvent& ev) {
  now_ = ev.t_ms;
  if (auto* nav = std::get_if<NavEvent>(&ev.payload)) {
    handle_nav(nav->url);
    return;
  }
  std::optional<ContextChange> change;
  try {
    auto [next, c] = step(sensor_state_, spec_, ev);
    sensor_state_ = std::move(next);
    change = std::move(c);
  } catch (const Error& e) {
    warn(e.key(), e.what());
    return;
  }
  if (change) handle_context(*change);
}

Session new_session(MobileAppSpec spec, const PageCorpus& corpus, ExtractCache* cache) {
  auto report = validate_spec(spec);
  if (!report.ok) {
    std::string first;
    for (const auto& i : report.issues) {
      if (i.severity == Severity::error) {
        first = i.key + " at " + i.path;
        break;
      }
    }
    throw Error("spec.invalid", {{"detail", first}});
  }
  return Session(std::move(spec), corpus, cache);
}

std::string TraceRun::log_jsonl() const {
  std::string out;
  for (const auto& e : log) out += to_json_line(e) + "\n";
  return out;
}

TraceRun run_trace(const MobileAppSpec& spec, const PageCorpus& corpus, const std::vector<SimEvent>& trace,
                   ExtractCache* cache) {
  Session s = new_session(spec, corpus, cache);
  for (const auto& ev : trace) s.feed(ev);
  return {s.log(), s.snapshots(), s.tour()};
}

void write_run(const TraceRun& run, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error("io.write-failed", {{"path", out_dir.string()}});
  for (const auto& s : run.snapshots) write_file_atomic((out_dir / s.name).string(), s.html);
  write_file_atomic((out_dir / "log.jsonl").string(), run.log_jsonl());
}

}  // namespace mowa
