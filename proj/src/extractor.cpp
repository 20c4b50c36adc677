#include "mowa/extractor.hpp"

#include <cctype>
#include <fstream>

#include <json.hpp>

#include "mowa/error.hpp"
#include "mowa/hash.hpp"
#include "mowa/url.hpp"

namespace mowa {
namespace fs = std::filesystem;

namespace {

std::string cache_key(std::string_view url) {
  auto n = url::normalize(url);
  if (!n) throw Error("extract.page-unavailable", {{"url", std::string(url)}});
  return *n;
}

}  // namespace

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

ExtractCache::ExtractCache(fs::path dir, FetchPolicy policy, Fetcher fetcher)
    : dir_(std::move(dir)), policy_(policy), fetcher_(std::move(fetcher)) {
  if (policy_ == FetchPolicy::cache_then_network && !fetcher_) fetcher_ = http_fetcher();
  load_index();
}

void ExtractCache::load_index() {
  fs::path index = dir_ / "index.json";
  if (!fs::exists(index)) return;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(index.string()));
  } catch (const nlohmann::json::exception& e) {
    throw Error("cache.broken", {{"path", index.string()}, {"reason", e.what()}});
  }
  for (const auto& [url, entry] : j.items()) {
    Entry e{entry.value("file", ""), entry.value("fetched_at", "")};
    if (e.file.empty() || !fs::exists(dir_ / e.file)) {
      throw Error("cache.broken", {{"path", index.string()}, {"reason", "missing snapshot for " + url}});
    }
    index_.emplace(url::normalize_or_keep(url), std::move(e));
  }
}

void ExtractCache::write_index_locked() {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [url, e] : index_) j[url] = {{"file", e.file}, {"fetched_at", e.fetched_at}};
  write_file_atomic((dir_ / "index.json").string(), j.dump(2) + "\n");
}

std::mutex& ExtractCache::url_mutex(const std::string& key) {
  std::lock_guard lock(mu_);
  auto& slot = url_locks_[key];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

std::optional<fs::path> ExtractCache::lookup(std::string_view url) const {
  auto key = url::normalize(url);
  if (!key) return std::nullopt;
  std::lock_guard lock(mu_);
  auto it = index_.find(*key);
  if (it == index_.end()) return std::nullopt;
  return dir_ / it->second.file;
}

size_t ExtractCache::size() const {
  std::lock_guard lock(mu_);
  return index_.size();
}

std::vector<std::string> ExtractCache::urls() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [u, e] : index_) out.push_back(u);
  return out;
}

fs::path ExtractCache::snapshot(std::string_view url) {
  std::string key = cache_key(url);
  std::lock_guard url_lock(url_mutex(key));
  if (auto existing = lookup(key)) return *existing;
  if (policy_ != FetchPolicy::cache_then_network) {
    throw Error("extract.page-unavailable", {{"url", key}});
  }
  auto body = fetcher_(key);
  if (!body) throw Error("extract.page-unavailable", {{"url", key}});

  std::string file = sha256_hex(key).substr(0, 16) + ".html";
  write_file_atomic((dir_ / file).string(), *body);
  std::lock_guard lock(mu_);
  index_[key] = Entry{file, utc_timestamp()};
  write_index_locked();
  return dir_ / file;
}

std::shared_ptr<const html::Document> ExtractCache::document(std::string_view url) {
  std::string key = cache_key(url);
  {
    std::lock_guard lock(mu_);
    if (auto it = parsed_.find(key); it != parsed_.end()) return it->second;
  }
  fs::path path = snapshot(key);
  auto doc = std::make_shared<const html::Document>(html::parse(read_file(path.string()), key));
  std::lock_guard lock(mu_);
  return parsed_.emplace(key, std::move(doc)).first->second;
}

std::string extract(std::string_view url, const xpath::Expr& expr, const ExtractMode& mode, ExtractCache& cache) {
  auto doc = cache.document(url);
  auto matches = xpath::evaluate(*doc, expr);
  if (matches.empty()) {
    throw Error("extract.no-match", {{"url", url::normalize_or_keep(url)}, {"xpath", expr.str()}});
  }
  const auto& first = matches.front();
  if (mode.is_text()) {
    if (first.attribute_value) return collapse_whitespace(*first.attribute_value);
    return collapse_whitespace(first.node->text_content());
  }
  const std::string* value = first.node->attribute(mode.attribute);
  if (!value) throw Error("extract.attribute-absent", {{"name", mode.attribute}});
  return *value;
}

std::string extract(const ExtractSource& source, ExtractCache& cache) {
  return extract(source.url, xpath::Expr::parse(source.xpath), source.mode, cache);
}

}  // namespace mowa
