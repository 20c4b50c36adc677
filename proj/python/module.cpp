#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "mowa/error.hpp"
#include "mowa/evaluation.hpp"
#include "mowa/extractor.hpp"
#include "mowa/html.hpp"
#include "mowa/i18n.hpp"
#include "mowa/sensors.hpp"
#include "mowa/service.hpp"
#include "mowa/spec_json.hpp"
#include "mowa/spec_xml.hpp"
#include "mowa/validate.hpp"
#include "mowa/weaver.hpp"
#include "mowa/xpath.hpp"

namespace py = pybind11;
using namespace mowa;
using nlohmann::json;

namespace {

// JSON crosses the boundary as text; the Python package decodes it.
std::string validate_text(const std::string& xml, const std::string& locale) {
  ValidationOptions o;
  o.locale = locale;
  return report_to_json(validate_spec(parse_spec(xml), o)).dump();
}

// Falls back to <corpus>/cache like the command-line tool.
std::unique_ptr<ExtractCache> open_cache(const std::optional<std::string>& dir, const std::optional<std::string>& corpus) {
  if (dir) return std::make_unique<ExtractCache>(*dir);
  if (corpus && std::filesystem::is_directory(std::filesystem::path(*corpus) / "cache")) {
    return std::make_unique<ExtractCache>(std::filesystem::path(*corpus) / "cache");
  }
  return nullptr;
}

py::tuple weave(const std::string& xml, const std::string& corpus_dir, const std::string& url,
                const std::optional<std::string>& context, const std::optional<std::string>& cache_dir) {
  auto corpus = PageCorpus::load(corpus_dir);
  auto cache = open_cache(cache_dir, corpus_dir);
  Session s = new_session(parse_spec(xml), corpus, cache.get());
  s.handle_nav(url);
  if (context) s.feed(parse_event(*context));
  std::vector<std::string> warnings;
  for (const auto& e : s.log()) {
    if (auto* w = std::get_if<log::Warning>(&e.event)) warnings.push_back(w->key);
  }
  std::string html = s.current_doc() ? html::serialize(*s.current_doc()) : "";
  return py::make_tuple(html, warnings);
}

std::string simulate(const std::string& xml, const std::string& corpus_dir, const std::string& trace_jsonl,
                     const std::optional<std::string>& cache_dir) {
  auto corpus = PageCorpus::load(corpus_dir);
  auto cache = open_cache(cache_dir, corpus_dir);
  auto run = run_trace(parse_spec(xml), corpus, parse_trace(trace_jsonl), cache.get());
  json snaps = json::array();
  for (const auto& s : run.snapshots) {
    snaps.push_back({{"t_ms", s.t_ms}, {"layer", s.layer}, {"name", s.name}, {"html", s.html}});
  }
  json visited = json::array();
  for (const auto& v : run.final_tour.visited) visited.push_back(v);
  return json{{"snapshots", snaps},
              {"log", run.log_jsonl()},
              {"tour",
               {{"mode", to_string(run.final_tour.mode)},
                {"expected_index", run.final_tour.expected_index},
                {"visited", visited}}}}
      .dump();
}

std::string extract_value(const std::string& url, const std::string& xpath, const std::string& mode,
                          const std::string& cache_dir) {
  auto m = ExtractMode::parse(mode);
  if (!m) throw Error("usage.invalid", {{"detail", "mode must be text or attr:<name>"}});
  ExtractCache cache(cache_dir);
  return extract(url, xpath::Expr::parse(xpath), *m, cache);
}

std::string grade_spec(const std::string& xml, const std::string& rubric_path,
                       const std::optional<std::string>& corpus_dir, const std::optional<std::string>& cache_dir) {
  auto rubric = eval::Rubric::load(rubric_path);
  rubric.check();
  std::optional<PageCorpus> corpus;
  if (corpus_dir) corpus = PageCorpus::load(*corpus_dir);
  auto cache = open_cache(cache_dir, corpus_dir);
  return eval::grade(parse_spec(xml), rubric, {cache.get(), corpus ? &*corpus : nullptr}).to_json().dump();
}

py::dict sign_test(const std::vector<double>& values, double median, double alpha) {
  auto t = eval::sign_test(values, median, alpha);
  py::dict d;
  d["median"] = t.hypothesized_median;
  d["n_below"] = t.n_below;
  d["n_equal"] = t.n_equal;
  d["n_above"] = t.n_above;
  d["p_value"] = t.p_value;
  d["alpha"] = t.alpha;
  d["reject"] = t.reject;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  static py::exception<Error> error_type(m, "MowaError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::dict args;
      for (const auto& [k, v] : e.args()) args[py::str(k)] = v;
      py::tuple payload = py::make_tuple(e.key(), i18n::message(e.key(), e.args()), args);
      PyErr_SetObject(error_type.ptr(), payload.ptr());
    }
  });

  m.def("canonicalize", [](const std::string& xml) { return serialize_spec(parse_spec(xml)); }, py::arg("xml"));
  m.def("validate", &validate_text, py::arg("xml"), py::arg("locale") = "en");
  m.def("spec_to_json", [](const std::string& xml) { return spec_to_json(parse_spec(xml)).dump(); }, py::arg("xml"));
  m.def("weave", &weave, py::arg("spec_xml"), py::arg("corpus_dir"), py::arg("page_url"), py::arg("context") = py::none(),
        py::arg("cache_dir") = py::none());
  m.def("simulate", &simulate, py::arg("spec_xml"), py::arg("corpus_dir"), py::arg("trace_jsonl"),
        py::arg("cache_dir") = py::none());
  m.def("extract", &extract_value, py::arg("url"), py::arg("xpath"), py::arg("mode"), py::arg("cache_dir"));
  m.def("grade", &grade_spec, py::arg("spec_xml"), py::arg("rubric_path"), py::arg("corpus_dir") = py::none(),
        py::arg("cache_dir") = py::none());

  m.def("sr", &eval::sr, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("e"));
  m.def(
      "grade_cells",
      [](double a, double b, double c, double d, double e, const std::string& participant) {
        return eval::GradeReport::from_cells(a, b, c, d, e, participant).to_json().dump();
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("e"), py::arg("participant") = "");
  m.def(
      "cohort_stats",
      [](const std::vector<double>& values) {
        auto s = eval::cohort_stats(values);
        return py::make_tuple(s.n, s.mean, s.sample_std);
      },
      py::arg("values"));
  m.def("sign_test", &sign_test, py::arg("values"), py::arg("median"), py::arg("alpha") = 0.05);
  m.def("round_half_away", &eval::round_half_away, py::arg("value"), py::arg("digits") = 2);

  m.def("message", [](const std::string& key, const std::string& locale) { return i18n::message(key, {}, locale); },
        py::arg("key"), py::arg("locale") = "en");
  m.def("locales", &i18n::locales);

  py::class_<service::Platform>(m, "Platform")
      .def(py::init([](const std::string& store, const std::optional<std::string>& corpus,
                       const std::optional<std::string>& cache, const std::string& locale) {
             service::Config c;
             c.store_dir = store;
             if (corpus) c.corpus_dir = *corpus;
             if (cache) c.cache_dir = *cache;
             c.locale = locale;
             return std::make_unique<service::Platform>(c);
           }),
           py::arg("store_dir"), py::arg("corpus_dir") = py::none(), py::arg("cache_dir") = py::none(),
           py::arg("locale") = "en")
      .def(
          "handle",
          [](service::Platform& p, const std::string& method, const std::string& path, const std::string& body) {
            service::Response r;
            {
              py::gil_scoped_release release;
              r = p.handle(method, path, body);
            }
            return py::make_tuple(r.status, r.content_type, py::bytes(r.body), r.headers);
          },
          py::arg("method"), py::arg("path"), py::arg("body") = "");
}
