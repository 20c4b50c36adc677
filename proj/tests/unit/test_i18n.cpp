#include <doctest.h>

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "mowa/i18n.hpp"

using namespace mowa;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Every message key the sources pass to Error(...), warn(...), error(...) or
// warning(...) as a string literal.
std::set<std::string> keys_used_in_sources() {
  std::set<std::string> out;
  std::regex call(R"re((?:Error|error|warning|warn|message)\(\s*(?:[a-z_]+,\s*)?"([a-z0-9]+\.[a-z0-9.-]+)")re");
  for (const char* f : {"augmenters.cpp", "binding.cpp", "evaluation.cpp", "extractor.cpp", "html.cpp", "i18n.cpp",
                        "sensors.cpp", "service.cpp", "spec.cpp", "spec_json.cpp", "spec_xml.cpp", "tour.cpp",
                        "validate.cpp", "weaver.cpp", "xpath.cpp", "hash.cpp", "url.cpp"}) {
    std::string text = slurp(std::string(MOWA_DATA_DIR) + "/../src/" + f);
    REQUIRE_MESSAGE(!text.empty(), f);
    for (std::sregex_iterator it(text.begin(), text.end(), call), end; it != end; ++it) out.insert((*it)[1]);
  }
  return out;
}

}  // namespace

TEST_CASE("three locales ship the same keys") {
  CHECK(i18n::locales() == std::vector<std::string>{"en", "es", "fr"});
  auto en = i18n::keys("en");
  CHECK(en.size() > 50);
  CHECK(i18n::keys("es") == en);
  CHECK(i18n::keys("fr") == en);
}

TEST_CASE("every key raised in the sources resolves in every locale") {
  auto used = keys_used_in_sources();
  CHECK(used.size() > 40);
  for (const auto& k : used) {
    for (const char* loc : {"en", "es", "fr"}) CHECK_MESSAGE(i18n::lookup(loc, k) != nullptr, loc << " " << k);
  }
}

TEST_CASE("interpolation and fallback") {
  CHECK(i18n::message("band.empty-range", {{"id", "quiet"}, {"min", "50"}, {"max", "50"}}, "en").find("quiet") !=
        std::string::npos);
  CHECK(i18n::message("band.empty-range", {{"id", "q"}}, "de") == i18n::message("band.empty-range", {{"id", "q"}}, "en"));
  CHECK(i18n::message("no.such-key") == "no.such-key");
  CHECK(i18n::message("session.busy", {{"id", "s"}}, "es") != i18n::message("session.busy", {{"id", "s"}}, "en"));
  CHECK_FALSE(i18n::has_locale("de"));
}
