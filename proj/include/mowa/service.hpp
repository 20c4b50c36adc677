#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mowa/error.hpp"
#include "mowa/extractor.hpp"
#include "mowa/spec.hpp"
#include "mowa/validate.hpp"
#include "mowa/weaver.hpp"

namespace httplib {
class Server;
}

namespace mowa::service {

struct Config {
  std::filesystem::path store_dir;
  // Optional; previews need it.
  std::optional<std::filesystem::path> corpus_dir;
  // Defaults to <corpus>/cache when that directory exists.
  std::optional<std::filesystem::path> cache_dir;
  std::string locale = "en";
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

struct AppRecord {
  std::string id;
  std::string name;
  std::string author;
  std::string uploaded_at;
  std::string visibility = "public";
  nlohmann::json to_json() const;
};

struct AppRequest {
  std::string id;
  std::string title;
  std::string description;
  std::string requester;
  std::string status = "open";
  std::optional<std::string> fulfilled_by;
  nlohmann::json to_json() const;
};

struct AuthoringSession {
  std::string id;
  MobileAppSpec spec;
  std::array<bool, kStageCount> completed{};
  std::string created_at;

  // First stage that is not complete, or kStageCount + 1 when all are.
  int stage() const;
  bool complete() const;
  nlohmann::json to_json() const;
};

// HTTP-free core of the platform: every endpoint is reachable through
// handle(), which the httplib binding forwards to.
class Platform {
 public:
  explicit Platform(Config config);
  ~Platform();

  Response handle(std::string_view method, std::string_view path, std::string_view body);

  const Config& config() const noexcept { return config_; }

 private:
  struct SessionSlot {
    std::mutex mu;
    AuthoringSession data;
  };

  Response publish(std::string_view body);
  Response list_apps();
  Response get_app(const std::string& id);
  Response create_request(std::string_view body);
  Response list_requests();
  Response fulfill(const std::string& id, std::string_view body);
  Response create_session(std::string_view body);
  Response get_session(const std::string& id);
  Response submit_stage(const std::string& id, const std::string& stage, std::string_view body);
  Response preview(const std::string& id, std::string_view body);
  Response export_session(const std::string& id);

  Response error(int status, const std::string& key, const Error::Args& args = {}) const;
  Response json_response(int status, const nlohmann::json& body) const;
  std::shared_ptr<SessionSlot> slot(const std::string& id);
  ValidationOptions validation_options() const;

  void load_store();
  void save_index_locked();
  void save_requests_locked();

  Config config_;
  PageCorpus corpus_;
  std::unique_ptr<ExtractCache> cache_;
  std::set<std::string> known_urls_;

  std::mutex store_mu_;
  std::map<std::string, AppRecord> apps_;
  std::vector<AppRequest> requests_;

  std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<SessionSlot>> sessions_;
  int next_session_ = 1;
};

// Routes every request under "/" to platform.handle().
void mount(httplib::Server& server, Platform& platform);

// Blocks serving on host:port. Returns false when binding fails.
bool serve(Platform& platform, const std::string& addr);

}  // namespace mowa::service
