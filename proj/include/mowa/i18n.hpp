#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mowa/error.hpp"

namespace mowa::i18n {

// Shipped language bundles; `en` is complete, others may fall back to it.
std::vector<std::string> locales();
bool has_locale(std::string_view locale);

// Raw template for a key, or nullptr when the locale's catalog lacks it.
const std::string* lookup(std::string_view locale, std::string_view key);

// Interpolates `{name}` placeholders. Falls back to `en`, then to the key.
std::string message(std::string_view key, const Error::Args& args = {}, std::string_view locale = "en");

// Keys of a locale's catalog, sorted.
std::vector<std::string> keys(std::string_view locale);

}  // namespace mowa::i18n
