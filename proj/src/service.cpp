#include "mowa/service.hpp"

#include <httplib.h>

#include "mowa/error.hpp"
#include "mowa/hash.hpp"
#include "mowa/i18n.hpp"
#include "mowa/sensors.hpp"
#include "mowa/spec_json.hpp"
#include "mowa/spec_xml.hpp"
#include "mowa/url.hpp"

namespace mowa::service {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  size_t i = 0;
  while (i < path.size()) {
    size_t j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    if (j > i) parts.emplace_back(path.substr(i, j - i));
    i = j + 1;
  }
  return parts;
}

std::optional<json> parse_body(std::string_view body) {
  if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) return json::object();
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

// Drops rules that point at sensors or layers a resubmitted stage removed, so
// the partial spec keeps parsing.
void prune_rules(MobileAppSpec& spec) {
  std::erase_if(spec.rules, [&](const ContextRule& r) { return !spec.sensor(r.sensor_id) || !spec.layer(r.layer_id); });
}

std::string first_error_detail(const ValidationReport& report) {
  for (const auto& i : report.issues) {
    if (i.severity == Severity::error) return i.key + " at " + i.path;
  }
  return {};
}

}  // namespace

json AppRecord::to_json() const {
  return {{"id", id}, {"name", name}, {"author", author}, {"uploaded_at", uploaded_at}, {"visibility", visibility}};
}

json AppRequest::to_json() const {
  json j{{"id", id}, {"title", title}, {"description", description}, {"requester", requester}, {"status", status}};
  j["fulfilled_by"] = fulfilled_by ? json(*fulfilled_by) : json(nullptr);
  return j;
}

int AuthoringSession::stage() const {
  for (int i = 0; i < kStageCount; ++i) {
    if (!completed[i]) return i + 1;
  }
  return kStageCount + 1;
}

bool AuthoringSession::complete() const { return stage() > kStageCount; }

json AuthoringSession::to_json() const {
  json flags = json::array();
  for (bool b : completed) flags.push_back(b);
  return {{"id", id},
          {"stage", stage()},
          {"completed", flags},
          {"complete", complete()},
          {"created_at", created_at},
          {"spec", spec_to_json(spec)},
          {"spec_xml", serialize_spec_unchecked(spec)}};
}

Platform::Platform(Config config) : config_(std::move(config)) {
  if (config_.corpus_dir) {
    corpus_ = PageCorpus::load(*config_.corpus_dir);
    if (!config_.cache_dir && fs::is_directory(*config_.corpus_dir / "cache")) config_.cache_dir = *config_.corpus_dir / "cache";
  }
  if (config_.cache_dir) cache_ = std::make_unique<ExtractCache>(*config_.cache_dir);
  for (auto& u : corpus_.urls()) known_urls_.insert(u);
  if (cache_) {
    for (auto& u : cache_->urls()) known_urls_.insert(u);
  }
  load_store();
}

Platform::~Platform() = default;

ValidationOptions Platform::validation_options() const {
  ValidationOptions o;
  if (!known_urls_.empty()) o.known_urls = &known_urls_;
  o.locale = config_.locale;
  return o;
}

void Platform::load_store() {
  std::error_code ec;
  fs::create_directories(config_.store_dir / "apps", ec);
  if (ec) throw Error("io.write-failed", {{"path", (config_.store_dir / "apps").string()}});
  fs::path index = config_.store_dir / "index.json";
  if (fs::exists(index)) {
    json j = json::parse(read_file(index.string()));
    for (const auto& [id, rec] : j.items()) {
      apps_[id] = AppRecord{id, rec.value("name", ""), rec.value("author", ""), rec.value("uploaded_at", ""),
                            rec.value("visibility", "public")};
    }
  }
  fs::path reqs = config_.store_dir / "requests.json";
  if (fs::exists(reqs)) {
    for (const auto& r : json::parse(read_file(reqs.string()))) {
      AppRequest q{r.value("id", ""), r.value("title", ""), r.value("description", ""), r.value("requester", ""),
                   r.value("status", "open"), std::nullopt};
      if (r.contains("fulfilled_by") && r["fulfilled_by"].is_string()) q.fulfilled_by = r["fulfilled_by"].get<std::string>();
      requests_.push_back(std::move(q));
    }
  }
}

void Platform::save_index_locked() {
  json j = json::object();
  for (const auto& [id, rec] : apps_) {
    json r = rec.to_json();
    r.erase("id");
    j[id] = r;
  }
  write_file_atomic((config_.store_dir / "index.json").string(), j.dump(2) + "\n");
}

void Platform::save_requests_locked() {
  json j = json::array();
  for (const auto& r : requests_) j.push_back(r.to_json());
  write_file_atomic((config_.store_dir / "requests.json").string(), j.dump(2) + "\n");
}

Response Platform::json_response(int status, const json& body) const {
  return {status, "application/json", body.dump(2) + "\n", {}};
}

Response Platform::error(int status, const std::string& key, const Error::Args& args) const {
  return json_response(status, {{"error", key}, {"message", i18n::message(key, args, config_.locale)}, {"args", args}});
}

std::shared_ptr<Platform::SessionSlot> Platform::slot(const std::string& id) {
  std::lock_guard lock(sessions_mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Response Platform::handle(std::string_view method, std::string_view path, std::string_view body) {
  auto p = split_path(path);
  auto is = [&](std::initializer_list<const char*> shape) {
    if (p.size() != shape.size()) return false;
    size_t i = 0;
    for (const char* s : shape) {
      if (std::string_view(s) != "*" && p[i] != s) return false;
      ++i;
    }
    return true;
  };
  try {
    if (method == "POST" && is({"apps"})) return publish(body);
    if (method == "GET" && is({"apps"})) return list_apps();
    if (method == "GET" && is({"apps", "*"})) return get_app(p[1]);
    if (method == "POST" && is({"requests"})) return create_request(body);
    if (method == "GET" && is({"requests"})) return list_requests();
    if (method == "POST" && is({"requests", "*", "fulfill"})) return fulfill(p[1], body);
    if (method == "POST" && is({"sessions"})) return create_session(body);
    if (method == "GET" && is({"sessions", "*"})) return get_session(p[1]);
    if (method == "POST" && is({"sessions", "*", "stages", "*"})) return submit_stage(p[1], p[3], body);
    if (method == "POST" && is({"sessions", "*", "preview"})) return preview(p[1], body);
    if (method == "POST" && is({"sessions", "*", "export"})) return export_session(p[1]);
    if (method == "GET" && is({"i18n", "*"})) {
      if (!i18n::has_locale(p[1])) return error(404, "route.not-found", {{"method", "GET"}, {"path", std::string(path)}});
      json cat = json::object();
      for (const auto& k : i18n::keys(p[1])) cat[k] = *i18n::lookup(p[1], k);
      return json_response(200, cat);
    }
  } catch (const Error& e) {
    return error(e.key().starts_with("io.") || e.key().starts_with("internal.") ? 500 : 400, e.key(), e.args());
  }
  return error(404, "route.not-found", {{"method", std::string(method)}, {"path", std::string(path)}});
}

Response Platform::publish(std::string_view body) {
  auto j = parse_body(body);
  if (!j || !j->is_object()) return error(400, "json.syntax", {{"detail", "expected a JSON object"}});
  if (!j->contains("spec") || !(*j)["spec"].is_string()) return error(400, "payload.invalid", {{"detail", "missing 'spec'"}});
  std::string visibility = j->value("visibility", "public");
  if (visibility != "public" && visibility != "unlisted") {
    return error(400, "payload.invalid", {{"detail", "visibility must be public or unlisted"}});
  }

  MobileAppSpec spec;
  try {
    spec = parse_spec((*j)["spec"].get<std::string>());
  } catch (const Error& e) {
    json out{{"error", e.key()}, {"message", i18n::message(e.key(), e.args(), config_.locale)}, {"args", e.args()}};
    return json_response(422, out);
  }
  auto report = validate_spec(spec, validation_options());
  if (!report.ok) {
    Error::Args args{{"detail", first_error_detail(report)}};
    return json_response(422, {{"error", "spec.invalid"},
                               {"message", i18n::message("spec.invalid", args, config_.locale)},
                               {"args", args},
                               {"report", report_to_json(report)}});
  }
  std::string canonical = serialize_spec(spec);
  std::string id = sha256_hex(canonical);

  std::lock_guard lock(store_mu_);
  if (auto it = apps_.find(id); it != apps_.end()) return json_response(200, it->second.to_json());
  write_file_atomic((config_.store_dir / "apps" / (id + ".mowa.xml")).string(), canonical);
  AppRecord rec{id, spec.name, j->value("author", ""), utc_timestamp(), visibility};
  apps_[id] = rec;
  save_index_locked();
  return json_response(201, rec.to_json());
}

Response Platform::list_apps() {
  std::lock_guard lock(store_mu_);
  json out = json::array();
  for (const auto& [id, rec] : apps_) {
    if (rec.visibility == "public") out.push_back(rec.to_json());
  }
  return json_response(200, out);
}

Response Platform::get_app(const std::string& id) {
  {
    std::lock_guard lock(store_mu_);
    if (!apps_.count(id)) return error(404, "app.not-found", {{"id", id}});
  }
  return {200, "application/xml", read_file((config_.store_dir / "apps" / (id + ".mowa.xml")).string()), {}};
}

Response Platform::create_request(std::string_view body) {
  auto j = parse_body(body);
  if (!j || !j->is_object()) return error(400, "json.syntax", {{"detail", "expected a JSON object"}});
  if (!j->contains("title") || !(*j)["title"].is_string() || (*j)["title"].get<std::string>().empty()) {
    return error(400, "payload.invalid", {{"detail", "missing 'title'"}});
  }
  std::lock_guard lock(store_mu_);
  AppRequest r{"req-" + std::to_string(requests_.size() + 1), (*j)["title"].get<std::string>(),
               j->value("description", ""), j->value("requester", ""), "open", std::nullopt};
  requests_.push_back(r);
  save_requests_locked();
  return json_response(201, r.to_json());
}

Response Platform::list_requests() {
  std::lock_guard lock(store_mu_);
  json out = json::array();
  for (const auto& r : requests_) out.push_back(r.to_json());
  return json_response(200, out);
}

Response Platform::fulfill(const std::string& id, std::string_view body) {
  auto j = parse_body(body);
  if (!j || !j->is_object()) return error(400, "json.syntax", {{"detail", "expected a JSON object"}});
  std::string app = j->value("app_id", "");
  std::lock_guard lock(store_mu_);
  auto it = std::find_if(requests_.begin(), requests_.end(), [&](const AppRequest& r) { return r.id == id; });
  if (it == requests_.end()) return error(404, "request.not-found", {{"id", id}});
  if (!apps_.count(app)) return error(404, "app.not-found", {{"id", app}});
  if (it->status == "fulfilled") return error(409, "request.already-fulfilled", {{"id", id}});
  it->status = "fulfilled";
  it->fulfilled_by = app;
  save_requests_locked();
  return json_response(200, it->to_json());
}

Response Platform::create_session(std::string_view body) {
  auto j = parse_body(body);
  if (!j || !j->is_object()) return error(400, "json.syntax", {{"detail", "expected a JSON object"}});
  auto s = std::make_shared<SessionSlot>();
  s->data.created_at = utc_timestamp();
  if (j->contains("import")) {
    std::string app = j->value("import", "");
    {
      std::lock_guard lock(store_mu_);
      if (!apps_.count(app)) return error(404, "app.not-found", {{"id", app}});
    }
    s->data.spec = parse_spec(read_file((config_.store_dir / "apps" / (app + ".mowa.xml")).string()));
    s->data.completed.fill(true);
  }
  std::lock_guard lock(sessions_mu_);
  s->data.id = "sess-" + std::to_string(next_session_++);
  sessions_[s->data.id] = s;
  return json_response(201, s->data.to_json());
}

Response Platform::get_session(const std::string& id) {
  auto s = slot(id);
  if (!s) return error(404, "session.not-found", {{"id", id}});
  std::lock_guard lock(s->mu);
  return json_response(200, s->data.to_json());
}

Response Platform::submit_stage(const std::string& id, const std::string& stage_text, std::string_view body) {
  auto s = slot(id);
  if (!s) return error(404, "session.not-found", {{"id", id}});
  std::unique_lock lock(s->mu, std::try_to_lock);
  if (!lock.owns_lock()) return error(409, "session.busy", {{"id", id}});

  int n = 0;
  if (stage_text.size() == 1 && stage_text[0] >= '1' && stage_text[0] <= '0' + kStageCount) n = stage_text[0] - '0';
  if (n == 0) return error(404, "route.not-found", {{"method", "POST"}, {"path", "stages/" + stage_text}});
  for (int k = 1; k < n; ++k) {
    if (!s->data.completed[k - 1]) {
      return error(409, "stage.order", {{"stage", std::to_string(n)}, {"missing", std::to_string(k)}});
    }
  }
  auto payload = parse_body(body);
  if (!payload) return error(400, "json.syntax", {{"detail", "request body is not JSON"}});

  MobileAppSpec next = s->data.spec;
  apply_stage_payload(next, static_cast<Stage>(n), *payload);
  if (n == kStageCount && next.rules.empty() && next.sensors.size() == 1) {
    for (const auto& layer : next.layers) next.rules.push_back({next.sensors.front().id, layer.id});
  }
  prune_rules(next);

  auto report = validate_stage(next, static_cast<Stage>(n), validation_options());
  if (!report.ok) {
    Error::Args args{{"detail", first_error_detail(report)}};
    return json_response(422, {{"error", "spec.invalid"},
                               {"message", i18n::message("spec.invalid", args, config_.locale)},
                               {"args", args},
                               {"report", report_to_json(report)},
                               {"session", s->data.to_json()}});
  }
  s->data.spec = std::move(next);
  s->data.completed[n - 1] = true;
  for (int k = n; k < kStageCount; ++k) s->data.completed[k] = false;
  return json_response(200, {{"report", report_to_json(report)}, {"session", s->data.to_json()}});
}

Response Platform::preview(const std::string& id, std::string_view body) {
  auto s = slot(id);
  if (!s) return error(404, "session.not-found", {{"id", id}});
  MobileAppSpec spec;
  {
    std::unique_lock lock(s->mu, std::try_to_lock);
    if (!lock.owns_lock()) return error(409, "session.busy", {{"id", id}});
    for (int k = 1; k <= static_cast<int>(Stage::layers); ++k) {
      if (!s->data.completed[k - 1]) return error(412, "preview.not-previewable", {{"missing", std::to_string(k)}});
    }
    spec = s->data.spec;
  }
  if (spec.layers.empty()) return error(412, "preview.not-previewable", {{"missing", "5"}});

  auto j = parse_body(body);
  if (!j || !j->is_object()) return error(400, "json.syntax", {{"detail", "expected a JSON object"}});
  std::string page = j->value("url", "");
  if (!corpus_.contains(page)) return error(404, "page.not-in-corpus", {{"url", page}});
  std::optional<SimEvent> reading;
  if (j->contains("reading") && !(*j)["reading"].is_null()) reading = parse_event((*j)["reading"].dump());

  if (spec.rules.empty()) {
    for (const auto& sensor : spec.sensors) {
      for (const auto& layer : spec.layers) spec.rules.push_back({sensor.id, layer.id});
    }
  }
  Session session(std::move(spec), corpus_, cache_.get());
  session.handle_nav(page);
  if (reading) session.feed(*reading);

  Response r{200, "text/html; charset=utf-8", session.current_doc() ? html::serialize(*session.current_doc()) : "", {}};
  std::string keys;
  for (const auto& e : session.log()) {
    if (auto* w = std::get_if<log::Warning>(&e.event)) keys += (keys.empty() ? "" : ",") + w->key;
  }
  if (!keys.empty()) r.headers["X-Mowa-Warnings"] = keys;
  return r;
}

Response Platform::export_session(const std::string& id) {
  auto s = slot(id);
  if (!s) return error(404, "session.not-found", {{"id", id}});
  std::unique_lock lock(s->mu, std::try_to_lock);
  if (!lock.owns_lock()) return error(409, "session.busy", {{"id", id}});
  std::string missing;
  for (int k = 1; k <= kStageCount; ++k) {
    if (!s->data.completed[k - 1]) missing += (missing.empty() ? "" : ",") + std::to_string(k);
  }
  if (!missing.empty()) return error(409, "stage.incomplete", {{"stage", missing}});
  return {200, "application/xml", serialize_spec(s->data.spec), {}};
}

void mount(httplib::Server& server, Platform& platform) {
  auto forward = [&platform](const httplib::Request& req, httplib::Response& res) {
    Response r = platform.handle(req.method, req.path, req.body);
    res.status = r.status;
    for (const auto& [k, v] : r.headers) res.set_header(k, v);
    res.set_content(r.body, r.content_type);
  };
  server.Get(R"(/.*)", forward);
  server.Post(R"(/.*)", forward);
}

bool serve(Platform& platform, const std::string& addr) {
  std::string host = "127.0.0.1";
  int port = 8080;
  auto colon = addr.rfind(':');
  try {
    if (colon == std::string::npos) {
      port = std::stoi(addr);
    } else {
      if (colon > 0) host = addr.substr(0, colon);
      port = std::stoi(addr.substr(colon + 1));
    }
  } catch (const std::exception&) {
    return false;
  }
  httplib::Server server;
  mount(server, platform);
  return server.listen(host, port);
}

}  // namespace mowa::service
