#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "fixtures.hpp"
#include "mowa/evaluation.hpp"
#include "mowa/sensors.hpp"
#include "mowa/spec_xml.hpp"
#include "mowa/weaver.hpp"

using namespace mowa;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string p(const fs::path& path) { return path.string(); }

fs::path temp(const std::string& name) {
  auto d = fs::temp_directory_path() / ("mowa-cli-" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("validate passes the fixture and flags an empty band") {
  auto ok = run({"validate", fixture::museum_spec_path()});
  CHECK(ok.code == cli::kExitOk);
  CHECK(json::parse(ok.out)["ok"] == true);

  auto media = fixture::media_spec();
  media.space->bands[0].max = media.space->bands[0].min;
  auto file = temp("band.mowa.xml");
  write_file_atomic(p(file), serialize_spec_unchecked(media));
  auto bad = run({"validate", p(file)});
  CHECK(bad.code == cli::kExitDomain);
  CHECK(bad.err.find("band.empty-range") != std::string::npos);
  CHECK(json::parse(bad.out)["ok"] == false);
  fs::remove(file);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"validate", fixture::museum_spec_path(), "--frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"validate", "/no/such/file"}).code == cli::kExitUsage);
  auto cells = run({"grade", "--cells", "1,1,1"});
  CHECK(cells.code == cli::kExitUsage);
  CHECK(cells.err.find("usage.invalid") != std::string::npos);
}

TEST_CASE("domain errors are localized") {
  auto file = temp("broken.mowa.xml");
  write_file_atomic(p(file), "<mowa-app name=\"x\">");
  auto en = run({"canonicalize", p(file)});
  auto es = run({"--locale", "es", "canonicalize", p(file)});
  CHECK(en.code == cli::kExitDomain);
  CHECK(es.code == cli::kExitDomain);
  CHECK(en.err.rfind("error: xml.syntax: ", 0) == 0);
  CHECK(es.err.rfind("error: xml.syntax: ", 0) == 0);
  CHECK(en.err != es.err);
  fs::remove(file);
}

TEST_CASE("canonicalize maps the source to the golden bytes") {
  auto r = run({"canonicalize", p(fixture::museum_dir() / "source.mowa.xml")});
  CHECK(r.code == 0);
  CHECK(r.out == read_file(fixture::museum_spec_path()));
}

TEST_CASE("weave matches a direct session") {
  json ctx{{"t", 0}, {"kind", "qr"}, {"payload", "http://en.qrwp.org/Toxodon"}};
  auto r = run({"weave", "--spec", fixture::museum_spec_path(), "--page-url", "https://en.wikipedia.org/wiki/Toxodon",
                "--context", ctx.dump(), "--corpus", p(fixture::museum_dir() / "corpus")});
  REQUIRE(r.code == 0);
  auto cache = fixture::museum_cache();
  Session s = new_session(fixture::museum_spec(), fixture::museum_corpus(), &cache);
  s.handle_nav("https://en.wikipedia.org/wiki/Toxodon");
  s.feed(parse_event(ctx.dump()));
  CHECK(r.out == html::serialize(*s.current_doc()));

  auto miss = run({"weave", "--spec", fixture::museum_spec_path(), "--page-url", "https://en.wikipedia.org/wiki/Dodo",
                   "--corpus", p(fixture::museum_dir() / "corpus")});
  CHECK(miss.code == cli::kExitDomain);
  CHECK(miss.err.find("nav.miss") != std::string::npos);
}

TEST_CASE("simulate writes twelve snapshots for the in-order walk") {
  auto out = temp("sim");
  auto r = run({"simulate", "--spec", fixture::museum_spec_path(), "--trace",
                p(fixture::museum_dir() / "traces" / "qr-in-order.jsonl"), "--corpus",
                p(fixture::museum_dir() / "corpus"), "--out", p(out)});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["snapshots"].size() == 12);
  CHECK(j["tour"]["mode"] == "complete");
  for (const auto& name : j["snapshots"]) CHECK(fs::exists(out / name.get<std::string>()));
  CHECK(fs::exists(out / "log.jsonl"));
  fs::remove_all(out);
}

TEST_CASE("extract reads the cache") {
  auto r = run({"extract", "--url", "https://museo.fcnym.unlp.edu.ar/beagle/toxodon.html", "--xpath",
                "//img[@class='piece']", "--mode", "attr:src", "--cache", p(fixture::museum_dir() / "corpus" / "cache")});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["value"] == "https://museo.fcnym.unlp.edu.ar/beagle/img/toxodon.jpg");
  auto bad = run({"extract", "--url", "https://museo.fcnym.unlp.edu.ar/beagle/toxodon.html", "--xpath", "//img",
                  "--mode", "html", "--cache", p(fixture::museum_dir() / "corpus" / "cache")});
  CHECK(bad.code == cli::kExitUsage);
}

TEST_CASE("grade output agrees with the library") {
  auto r = run({"grade", "--candidate", fixture::museum_spec_path(), "--rubric", p(fixture::museum_dir() / "rubric.json"),
                "--corpus", p(fixture::museum_dir() / "corpus")});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["sr"] == 1.0);

  auto c = run({"grade", "--cells", "0.98,0.5,0.5,1,1", "--participant", "1"});
  REQUIRE(c.code == 0);
  auto report = eval::GradeReport::from_json(json::parse(c.out));
  CHECK(report.sr == eval::sr(0.98, 0.5, 0.5, 1, 1));
  CHECK(report.participant == "1");
}

TEST_CASE("stats over the bundled reports") {
  auto r = run({"stats", "--reports", p(fixture::data_dir() / "table2" / "reports"), "--sign-median", "0.84"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["n"] == 21);
  CHECK(j["display"]["mean"] == "0.86");
  CHECK(j["display"]["sample_std"] == "0.1879");
  CHECK(j["display"]["p_value"] == "0.0207");
  CHECK(j["sign_test"]["n_above"] == 15);
  CHECK(j["sign_test"]["n_equal"] == 1);
  CHECK(j["sign_test"]["reject"] == true);

  auto table = run({"stats", "--reports", p(fixture::data_dir() / "table2" / "reports"), "--table"});
  REQUIRE(table.code == 0);
  auto last = table.out.substr(table.out.rfind('%'));
  CHECK(last.find("0.82") != std::string::npos);
  CHECK(last.find("0.86") != std::string::npos);
}
