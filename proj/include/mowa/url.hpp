#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace mowa::url {

// Lowercases scheme and host, drops default ports and the fragment, keeps
// the query. An empty path becomes "/". Returns nullopt for anything that is
// not an absolute http(s)/file URL.
std::optional<std::string> normalize(std::string_view raw);

bool is_absolute(std::string_view raw);

// Normalizes when possible, otherwise returns the input unchanged.
std::string normalize_or_keep(std::string_view raw);

// `*` matches any span (including `/`); every other character is literal.
bool glob_match(std::string_view pattern, std::string_view text);

}  // namespace mowa::url
