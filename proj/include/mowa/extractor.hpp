#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mowa/html.hpp"
#include "mowa/spec.hpp"
#include "mowa/xpath.hpp"

namespace mowa {

enum class FetchPolicy { cache_only, cache_then_network };

// Network boundary. Returns the body on HTTP 200, nullopt otherwise.
using Fetcher = std::function<std::optional<std::string>(const std::string& url)>;

// Plain HTTP(S) GET, no cookies, fixed client identifier.
Fetcher http_fetcher();
inline constexpr std::string_view kClientIdentifier = "mowa-extractor/1.0";

// Directory of page snapshots keyed by normalized URL, with `index.json`
// mapping URL -> {file, fetched_at}. Reads may run concurrently; snapshot
// writes are serialized per URL.
class ExtractCache {
 public:
  explicit ExtractCache(std::filesystem::path dir, FetchPolicy policy = FetchPolicy::cache_only,
                        Fetcher fetcher = {});

  const std::filesystem::path& dir() const noexcept { return dir_; }
  FetchPolicy policy() const noexcept { return policy_; }

  // Path of the cached snapshot, if any.
  std::optional<std::filesystem::path> lookup(std::string_view url) const;

  // Ensures the page is cached and returns its path. Idempotent. Throws
  // Error("extract.page-unavailable").
  std::filesystem::path snapshot(std::string_view url);

  // Parsed snapshot, memoized.
  std::shared_ptr<const html::Document> document(std::string_view url);

  size_t size() const;
  std::vector<std::string> urls() const;

 private:
  struct Entry {
    std::string file;
    std::string fetched_at;
  };

  void load_index();
  void write_index_locked();
  std::mutex& url_mutex(const std::string& key);

  std::filesystem::path dir_;
  FetchPolicy policy_;
  Fetcher fetcher_;

  mutable std::mutex mu_;
  std::map<std::string, Entry> index_;
  std::map<std::string, std::unique_ptr<std::mutex>> url_locks_;
  std::map<std::string, std::shared_ptr<const html::Document>> parsed_;
};

// First match wins. Text mode concatenates descendant text and collapses
// whitespace; attribute mode returns the attribute value. Throws Error with
//   extract.page-unavailable (url)
//   extract.no-match         (url, xpath)
//   extract.attribute-absent (name)
std::string extract(std::string_view url, const xpath::Expr& xpath, const ExtractMode& mode, ExtractCache& cache);
std::string extract(const ExtractSource& source, ExtractCache& cache);

std::string collapse_whitespace(std::string_view s);

}  // namespace mowa
