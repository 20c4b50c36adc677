#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mowa/error.hpp"
#include "mowa/evaluation.hpp"
#include "mowa/extractor.hpp"
#include "mowa/hash.hpp"
#include "mowa/html.hpp"
#include "mowa/i18n.hpp"
#include "mowa/sensors.hpp"
#include "mowa/service.hpp"
#include "mowa/spec_json.hpp"
#include "mowa/spec_xml.hpp"
#include "mowa/validate.hpp"
#include "mowa/weaver.hpp"

namespace mowa::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string locale = "en";

  std::string spec;
  std::string page_url;
  std::string context;
  std::string corpus;
  std::string cache;
  std::string trace;
  std::string out_dir;

  std::string url;
  std::string xpath;
  std::string mode = "text";
  bool network = false;

  std::string candidate;
  std::string rubric;
  std::vector<double> cells;
  std::string participant;

  std::string reports;
  std::optional<double> sign_median;
  double alpha = 0.05;
  int precision = 2;
  bool table = false;

  std::string addr = "127.0.0.1:8080";
  std::string store;
};

MobileAppSpec load_spec(const std::string& path) { return parse_spec(read_file(path)); }

std::unique_ptr<ExtractCache> open_cache(const std::string& dir, const std::string& corpus) {
  if (!dir.empty()) return std::make_unique<ExtractCache>(dir);
  if (!corpus.empty() && fs::is_directory(fs::path(corpus) / "cache")) {
    return std::make_unique<ExtractCache>(fs::path(corpus) / "cache");
  }
  return nullptr;
}

void print_warnings(const std::vector<LogEntry>& log, std::ostream& err) {
  for (const auto& e : log) {
    if (auto* w = std::get_if<log::Warning>(&e.event)) err << "warning: " << w->key << ": " << w->detail << "\n";
  }
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  MobileAppSpec spec = load_spec(o.spec);
  ValidationOptions vo;
  vo.locale = o.locale;
  auto report = validate_spec(spec, vo);
  out << report_to_json(report).dump(2) << "\n";
  for (const auto& i : report.issues) {
    err << to_string(i.severity) << ": " << i.key << " at " << i.path << ": " << i.message << "\n";
  }
  return report.ok ? kExitOk : kExitDomain;
}

int cmd_canonicalize(const Options& o, std::ostream& out, std::ostream&) {
  std::string bytes = serialize_spec(load_spec(o.spec));
  if (o.out_dir.empty()) {
    out << bytes;
  } else {
    write_file_atomic(o.out_dir, bytes);
  }
  return kExitOk;
}

int cmd_weave(const Options& o, std::ostream& out, std::ostream& err) {
  auto corpus = PageCorpus::load(o.corpus);
  auto cache = open_cache(o.cache, o.corpus);
  Session s = new_session(load_spec(o.spec), corpus, cache.get());
  s.handle_nav(o.page_url);
  if (!o.context.empty()) s.feed(parse_event(o.context));
  print_warnings(s.log(), err);
  if (!s.current_doc()) throw Error("page.not-in-corpus", {{"url", o.page_url}});
  out << html::serialize(*s.current_doc());
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  auto corpus = PageCorpus::load(o.corpus);
  auto cache = open_cache(o.cache, o.corpus);
  auto trace = parse_trace(read_file(o.trace));
  TraceRun run = run_trace(load_spec(o.spec), corpus, trace, cache.get());
  write_run(run, o.out_dir);
  print_warnings(run.log, err);

  json snaps = json::array();
  for (const auto& s : run.snapshots) snaps.push_back(s.name);
  json visited = json::array();
  for (const auto& v : run.final_tour.visited) visited.push_back(v);
  out << json{{"events", trace.size()},
              {"log_entries", run.log.size()},
              {"snapshots", snaps},
              {"tour",
               {{"mode", to_string(run.final_tour.mode)},
                {"expected_index", run.final_tour.expected_index},
                {"visited", visited}}}}
             .dump(2)
      << "\n";
  return kExitOk;
}

int cmd_extract(const Options& o, std::ostream& out, std::ostream&) {
  auto mode = ExtractMode::parse(o.mode);
  if (!mode) throw Error("usage.invalid", {{"detail", "--mode must be text or attr:<name>"}});
  ExtractCache cache(o.cache, o.network ? FetchPolicy::cache_then_network : FetchPolicy::cache_only,
                     o.network ? http_fetcher() : Fetcher{});
  std::string value = extract(o.url, xpath::Expr::parse(o.xpath), *mode, cache);
  out << json{{"url", o.url}, {"xpath", o.xpath}, {"mode", mode->str()}, {"value", value}}.dump(2) << "\n";
  return kExitOk;
}

int cmd_grade(const Options& o, std::ostream& out, std::ostream&) {
  eval::GradeReport report;
  if (!o.cells.empty()) {
    if (o.cells.size() != 5) throw Error("usage.invalid", {{"detail", "--cells takes five values a,b,c,d,e"}});
    report = eval::GradeReport::from_cells(o.cells[0], o.cells[1], o.cells[2], o.cells[3], o.cells[4], o.participant);
  } else {
    if (o.candidate.empty() || o.rubric.empty()) {
      throw Error("usage.invalid", {{"detail", "grade needs --candidate and --rubric, or --cells"}});
    }
    auto rubric = eval::Rubric::load(o.rubric);
    rubric.check();
    std::optional<PageCorpus> corpus;
    if (!o.corpus.empty()) corpus = PageCorpus::load(o.corpus);
    auto cache = open_cache(o.cache, o.corpus);
    eval::GradeOptions go{cache.get(), corpus ? &*corpus : nullptr};
    report = eval::grade(load_spec(o.candidate), rubric, go);
    report.participant = o.participant;
  }
  out << report.to_json().dump(2) << "\n";
  return kExitOk;
}

std::vector<eval::GradeReport> load_reports(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<eval::GradeReport> out;
  for (const auto& f : files) {
    json j = json::parse(read_file(f.string()), nullptr, false);
    if (j.is_discarded()) throw Error("json.syntax", {{"detail", f.string()}});
    out.push_back(eval::GradeReport::from_json(j));
  }
  return out;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << eval::round_half_away(v, digits);
  return s.str();
}

int cmd_stats(const Options& o, std::ostream& out, std::ostream&) {
  auto reports = load_reports(o.reports);
  if (o.table) {
    out << eval::format_table(reports);
    return kExitOk;
  }
  std::vector<double> srs;
  for (const auto& r : reports) srs.push_back(o.precision >= 0 ? eval::round_half_away(r.sr, o.precision) : r.sr);
  auto st = eval::cohort_stats(srs);
  json j{{"n", st.n},
         {"precision", o.precision},
         {"mean", st.mean},
         {"sample_std", st.sample_std},
         {"display", {{"mean", fixed(st.mean, 2)}, {"sample_std", fixed(st.sample_std, 4)}}}};
  if (o.sign_median) {
    auto t = eval::sign_test(srs, *o.sign_median, o.alpha);
    j["sign_test"] = {{"median", t.hypothesized_median},
                      {"n_below", t.n_below},
                      {"n_equal", t.n_equal},
                      {"n_above", t.n_above},
                      {"p_value", t.p_value},
                      {"alpha", t.alpha},
                      {"reject", t.reject}};
    j["display"]["p_value"] = fixed(t.p_value, 4);
  }
  out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
  service::Config config;
  config.store_dir = o.store;
  if (!o.corpus.empty()) config.corpus_dir = o.corpus;
  if (!o.cache.empty()) config.cache_dir = o.cache;
  config.locale = o.locale;
  service::Platform platform(config);
  out << "listening on " << o.addr << std::endl;
  if (!service::serve(platform, o.addr)) {
    err << "error: cannot listen on " << o.addr << "\n";
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Mobile Web augmentation engine"};
  app.name("mowa");
  app.require_subcommand(1);
  app.add_option("--locale", o.locale, "Message locale")->envname("MOWA_LOCALE");

  auto* validate = app.add_subcommand("validate", "Validate a spec file");
  validate->add_option("spec", o.spec, "Spec file")->required()->check(CLI::ExistingFile);

  auto* canonicalize = app.add_subcommand("canonicalize", "Print the canonical form of a spec");
  canonicalize->add_option("spec", o.spec, "Spec file")->required()->check(CLI::ExistingFile);
  canonicalize->add_option("--out", o.out_dir, "Write to this file instead of stdout");

  auto* weave = app.add_subcommand("weave", "Augment one corpus page");
  weave->add_option("--spec", o.spec)->required()->check(CLI::ExistingFile)->envname("MOWA_SPEC");
  weave->add_option("--page-url", o.page_url)->required();
  weave->add_option("--context", o.context, "One trace event as JSON");
  weave->add_option("--corpus", o.corpus)->required()->check(CLI::ExistingDirectory)->envname("MOWA_CORPUS");
  weave->add_option("--cache", o.cache)->check(CLI::ExistingDirectory)->envname("MOWA_CACHE");

  auto* simulate = app.add_subcommand("simulate", "Replay a sensor trace");
  simulate->add_option("--spec", o.spec)->required()->check(CLI::ExistingFile)->envname("MOWA_SPEC");
  simulate->add_option("--trace", o.trace)->required()->check(CLI::ExistingFile);
  simulate->add_option("--corpus", o.corpus)->required()->check(CLI::ExistingDirectory)->envname("MOWA_CORPUS");
  simulate->add_option("--cache", o.cache)->check(CLI::ExistingDirectory)->envname("MOWA_CACHE");
  simulate->add_option("--out", o.out_dir)->required();

  auto* extract = app.add_subcommand("extract", "Extract a value from a cached page");
  extract->add_option("--url", o.url)->required();
  extract->add_option("--xpath", o.xpath)->required();
  extract->add_option("--mode", o.mode, "text or attr:<name>");
  extract->add_option("--cache", o.cache)->required()->envname("MOWA_CACHE");
  extract->add_flag("--network", o.network, "Fetch pages missing from the cache");

  auto* grade = app.add_subcommand("grade", "Grade a candidate spec");
  grade->add_option("--candidate", o.candidate)->check(CLI::ExistingFile);
  grade->add_option("--rubric", o.rubric)->check(CLI::ExistingFile);
  grade->add_option("--corpus", o.corpus)->check(CLI::ExistingDirectory)->envname("MOWA_CORPUS");
  grade->add_option("--cache", o.cache)->check(CLI::ExistingDirectory)->envname("MOWA_CACHE");
  grade->add_option("--cells", o.cells, "a,b,c,d,e")->delimiter(',');
  grade->add_option("--participant", o.participant);

  auto* stats = app.add_subcommand("stats", "Cohort statistics over grade reports");
  stats->add_option("--reports", o.reports)->required()->check(CLI::ExistingDirectory);
  stats->add_option("--sign-median", o.sign_median);
  stats->add_option("--alpha", o.alpha)->check(CLI::Range(0.0, 1.0));
  stats->add_option("--precision", o.precision, "Round SR to this many decimals first; -1 keeps it unrounded");
  stats->add_flag("--table", o.table, "Print the text table instead of JSON");

  auto* serve = app.add_subcommand("serve", "Run the platform service");
  serve->add_option("--addr", o.addr)->envname("MOWA_ADDR");
  serve->add_option("--store", o.store)->required()->envname("MOWA_STORE");
  serve->add_option("--corpus", o.corpus)->check(CLI::ExistingDirectory)->envname("MOWA_CORPUS");
  serve->add_option("--cache", o.cache)->check(CLI::ExistingDirectory)->envname("MOWA_CACHE");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage.invalid: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(o, out, err);
    if (*canonicalize) return cmd_canonicalize(o, out, err);
    if (*weave) return cmd_weave(o, out, err);
    if (*simulate) return cmd_simulate(o, out, err);
    if (*extract) return cmd_extract(o, out, err);
    if (*grade) return cmd_grade(o, out, err);
    if (*stats) return cmd_stats(o, out, err);
    if (*serve) return cmd_serve(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.key() << ": " << i18n::message(e.key(), e.args(), o.locale) << "\n";
    return e.key() == "usage.invalid" ? kExitUsage : kExitDomain;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace mowa::cli
