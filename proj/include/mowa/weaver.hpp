#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mowa/augmenters.hpp"
#include "mowa/extractor.hpp"
#include "mowa/html.hpp"
#include "mowa/sensors.hpp"
#include "mowa/spec.hpp"
#include "mowa/tour.hpp"

namespace mowa {

// Offline stand-in for the Web: `manifest.json` maps normalized URL to a path
// relative to the corpus directory.
class PageCorpus {
 public:
  // Throws Error("corpus.broken") when the manifest is unreadable or a listed
  // page is missing.
  static PageCorpus load(const std::filesystem::path& dir);

  PageCorpus() = default;
  PageCorpus(PageCorpus&&) noexcept = default;
  PageCorpus& operator=(PageCorpus&&) noexcept = default;

  const std::filesystem::path& dir() const noexcept { return dir_; }
  bool contains(std::string_view url) const;
  std::vector<std::string> urls() const;
  // Parsed page, or nullopt when the URL is not in the manifest.
  std::optional<html::Document> page(std::string_view url) const;

  // Registers an in-memory page (used by tests and previews).
  void add(std::string url, std::string bytes);

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> files_;
  std::map<std::string, std::string> inline_;
  mutable std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
  mutable std::map<std::string, std::shared_ptr<const html::Document>> parsed_;
};

namespace log {
struct NavLoaded {
  std::string url;
};
struct RuleFired {
  std::string sensor;
  std::string layer;
  std::string semantic;
};
struct LayerApplied {
  std::string layer;
  std::string url;
  int augmenters = 0;
  int warnings = 0;
};
struct Warning {
  std::string key;
  std::string detail;
};
struct Snapshot {
  std::string path;
};
}  // namespace log

using LogEvent = std::variant<log::NavLoaded, log::RuleFired, log::LayerApplied, log::Warning, log::Snapshot>;

struct LogEntry {
  int64_t t_ms = 0;
  LogEvent event;
};

std::string to_json_line(const LogEntry& entry);

struct PageSnapshot {
  int64_t t_ms = 0;
  std::string layer;
  std::string name;  // `<t_ms>-<layer>.html`, suffixed on collision
  std::string html;
};

class Session {
 public:
  // Does not validate; see new_session.
  Session(MobileAppSpec spec, const PageCorpus& corpus, ExtractCache* cache = nullptr);

  const MobileAppSpec& spec() const noexcept { return spec_; }
  const std::optional<std::string>& current_url() const noexcept { return current_url_; }
  const std::optional<html::Document>& current_doc() const noexcept { return current_doc_; }
  const SensorState& sensor_state() const noexcept { return sensor_state_; }
  const TourState& tour() const noexcept { return tour_; }
  const std::vector<LogEntry>& log() const noexcept { return log_; }
  const std::vector<PageSnapshot>& snapshots() const noexcept { return snapshots_; }

  // Clock for log entries and snapshot names.
  void set_time(int64_t t_ms) { now_ = t_ms; }

  void handle_nav(const std::string& url);
  void handle_context(const ContextChange& change);
  // Routes one trace event: navigation, or a sensor step followed by
  // handle_context when it yields a change.
  void feed(const SimEvent& ev);

 private:
  struct Binding {
    const PointOfInterest* poi = nullptr;
    std::optional<augmenters::ActiveBand> band;
  };

  bool load(const std::string& url);
  void apply(const Layer& layer, const Binding& binding);
  bool condition_holds(const Semantic& value) const;
  Binding binding_for(const Semantic& value) const;
  bool layer_targets(const Layer& layer, const std::string& url, const PointOfInterest* poi) const;
  void warn(std::string key, std::string detail);

  MobileAppSpec spec_;
  const PageCorpus* corpus_;
  ExtractCache* cache_;
  std::optional<std::string> current_url_;
  std::optional<html::Document> current_doc_;
  SensorState sensor_state_;
  TourState tour_;
  std::vector<LogEntry> log_;
  std::vector<PageSnapshot> snapshots_;
  int64_t now_ = 0;
};

// Validates the spec first. Throws Error("spec.invalid") or
// Error("links.not-a-chain").
Session new_session(MobileAppSpec spec, const PageCorpus& corpus, ExtractCache* cache = nullptr);

struct TraceRun {
  std::vector<LogEntry> log;
  std::vector<PageSnapshot> snapshots;
  TourState final_tour;
  std::string log_jsonl() const;
};

TraceRun run_trace(const MobileAppSpec& spec, const PageCorpus& corpus, const std::vector<SimEvent>& trace,
                   ExtractCache* cache = nullptr);

// Writes every snapshot plus `log.jsonl` into `out_dir`.
void write_run(const TraceRun& run, const std::filesystem::path& out_dir);

}  // namespace mowa
