#include "mowa/url.hpp"

#include <algorithm>
#include <cctype>

namespace mowa::url {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool valid_scheme(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '+' || c == '-' || c == '.';
  });
}

}  // namespace

std::optional<std::string> normalize(std::string_view raw) {
  auto colon = raw.find("://");
  if (colon == std::string_view::npos) return std::nullopt;
  std::string scheme = lower(raw.substr(0, colon));
  if (!valid_scheme(scheme)) return std::nullopt;
  std::string_view rest = raw.substr(colon + 3);

  if (auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);

  auto path_start = rest.find_first_of("/?");
  std::string_view authority = rest.substr(0, path_start);
  std::string_view tail = path_start == std::string_view::npos ? std::string_view{} : rest.substr(path_start);
  if (authority.empty() && scheme != "file") return std::nullopt;
  if (authority.find_first_of(" \t\r\n") != std::string_view::npos) return std::nullopt;

  std::string host = lower(authority);
  if (auto at = host.rfind('@'); at != std::string::npos) {
    // userinfo keeps its case
    host = std::string(authority.substr(0, at + 1)) + host.substr(at + 1);
  }
  auto port_sep = host.rfind(':');
  if (port_sep != std::string::npos && host.find(']', port_sep) == std::string::npos) {
    std::string port = host.substr(port_sep + 1);
    if ((scheme == "http" && port == "80") || (scheme == "https" && port == "443") || port.empty()) {
      host.erase(port_sep);
    }
  }

  std::string out = scheme + "://" + host;
  if (tail.empty() || tail.front() == '?') out += '/';
  out += tail;
  return out;
}

bool is_absolute(std::string_view raw) { return normalize(raw).has_value(); }

std::string normalize_or_keep(std::string_view raw) {
  auto n = normalize(raw);
  return n ? *n : std::string(raw);
}

bool glob_match(std::string_view pattern, std::string_view text) {
  // Classic two-pointer wildcard match with backtracking to the last star.
  size_t p = 0, t = 0;
  size_t star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (p < pattern.size() && pattern[p] == text[t]) {
      ++p;
      ++t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace mowa::url
