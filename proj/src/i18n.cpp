#include "mowa/i18n.hpp"

#include <map>

#include <json.hpp>

namespace mowa::i18n {
namespace detail {
extern const std::string_view kCatalogEn;
extern const std::string_view kCatalogEs;
extern const std::string_view kCatalogFr;
}  // namespace detail

namespace {

using Catalog = std::map<std::string, std::string, std::less<>>;

const std::map<std::string, Catalog, std::less<>>& catalogs() {
  static const auto kAll = [] {
    std::map<std::string, Catalog, std::less<>> all;
    const std::pair<const char*, std::string_view> sources[] = {
        {"en", detail::kCatalogEn}, {"es", detail::kCatalogEs}, {"fr", detail::kCatalogFr}};
    for (const auto& [name, text] : sources) {
      Catalog cat;
      auto j = nlohmann::json::parse(text);
      for (auto it = j.begin(); it != j.end(); ++it) cat.emplace(it.key(), it.value().get<std::string>());
      all.emplace(name, std::move(cat));
    }
    return all;
  }();
  return kAll;
}

std::string interpolate(const std::string& tmpl, const Error::Args& args) {
  std::string out;
  out.reserve(tmpl.size());
  for (size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{') {
      auto close = tmpl.find('}', i);
      if (close != std::string::npos) {
        auto it = args.find(tmpl.substr(i + 1, close - i - 1));
        if (it != args.end()) {
          out += it->second;
          i = close;
          continue;
        }
      }
    }
    out += tmpl[i];
  }
  return out;
}

}  // namespace

std::vector<std::string> locales() {
  std::vector<std::string> out;
  for (const auto& [name, cat] : catalogs()) out.push_back(name);
  return out;
}

bool has_locale(std::string_view locale) { return catalogs().count(locale) > 0; }

const std::string* lookup(std::string_view locale, std::string_view key) {
  auto cat = catalogs().find(locale);
  if (cat == catalogs().end()) return nullptr;
  auto it = cat->second.find(key);
  return it == cat->second.end() ? nullptr : &it->second;
}

std::string message(std::string_view key, const Error::Args& args, std::string_view locale) {
  const std::string* tmpl = lookup(locale, key);
  if (!tmpl) tmpl = lookup("en", key);
  if (!tmpl) return std::string(key);
  return interpolate(*tmpl, args);
}

std::vector<std::string> keys(std::string_view locale) {
  std::vector<std::string> out;
  auto cat = catalogs().find(locale);
  if (cat == catalogs().end()) return out;
  for (const auto& [k, v] : cat->second) out.push_back(k);
  return out;
}

}  // namespace mowa::i18n
