#include <httplib.h>

#include "mowa/extractor.hpp"
#include "mowa/url.hpp"

namespace mowa {

Fetcher http_fetcher() {
  return [](const std::string& raw) -> std::optional<std::string> {
    auto normalized = url::normalize(raw);
    if (!normalized) return std::nullopt;
    const std::string& u = *normalized;
    auto scheme_end = u.find("://");
    auto path_start = u.find('/', scheme_end + 3);
    std::string origin = u.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : u.substr(path_start);

    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(10);
    client.set_read_timeout(20);
    httplib::Headers headers{{"User-Agent", std::string(kClientIdentifier)}};
    auto res = client.Get(path, headers);
    if (!res || res->status != 200) return std::nullopt;
    return res->body;
  };
}

}  // namespace mowa
