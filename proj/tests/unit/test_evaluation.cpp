#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "mowa/error.hpp"
#include "mowa/binding.hpp"
#include "mowa/evaluation.hpp"
#include "oracles.hpp"

using namespace mowa;
using namespace mowa::eval;
using nlohmann::json;

namespace {

struct PaperRow {
  int ps = 0;
  double a, b, r1, c, d, e, r23, sr;
};

// Rows of the grading table exactly as printed in paper.md, plus its "%" row.
struct PaperTable {
  std::vector<PaperRow> rows;
  double mean_r1 = 0, mean_r23 = 0, mean_sr = 0;
};

PaperTable paper_table() {
  std::istringstream in(read_file(std::string(MOWA_DATA_DIR) + "/../paper.md"));
  PaperTable t;
  std::string line;
  bool inside = false;
  while (std::getline(in, line)) {
    if (line.rfind("PS.\tR1", 0) == 0) {
      inside = true;
      continue;
    }
    if (!inside) continue;
    if (line.rfind("%", 0) == 0) {
      std::istringstream s(line.substr(1));
      s >> t.mean_r1 >> t.mean_r23 >> t.mean_sr;
      break;
    }
    std::istringstream s(line);
    PaperRow r;
    if (s >> r.ps >> r.a >> r.b >> r.r1 >> r.c >> r.d >> r.e >> r.r23 >> r.sr) t.rows.push_back(r);
  }
  return t;
}

double formula(double a, double b, double c, double d, double e) {
  double r1 = (a + b) / 2;
  double r23 = (c + d + e) / 3;
  return (r1 + 2 * r23) / 3;
}

std::vector<double> printed_srs() {
  std::vector<double> out;
  for (const auto& r : paper_table().rows) out.push_back(r.sr);
  return out;
}

Rubric museum_rubric() { return Rubric::load((fixture::museum_dir() / "rubric.json").string()); }

}  // namespace

TEST_CASE("the bundled table matches the paper") {
  auto t = paper_table();
  REQUIRE(t.rows.size() == 21);
  auto bundled = json::parse(read_file((fixture::data_dir() / "table2" / "participants.json").string()));
  REQUIRE(bundled["participants"].size() == 21);
  for (size_t i = 0; i < 21; ++i) {
    const auto& j = bundled["participants"][i];
    CHECK(j["a"].get<double>() == t.rows[i].a);
    CHECK(j["e"].get<double>() == t.rows[i].e);
    CHECK(std::stod(j["printed"]["sr"].get<std::string>()) == t.rows[i].sr);
  }
}

TEST_CASE("sr reproduces every printed row") {
  auto t = paper_table();
  double s1 = 0, s23 = 0, ssr = 0;
  for (const auto& r : t.rows) {
    auto g = GradeReport::from_cells(r.a, r.b, r.c, r.d, r.e);
    CAPTURE(r.ps);
    CHECK(std::abs(g.r1 - r.r1) <= 0.005 + 1e-12);
    CHECK(std::abs(g.r23 - r.r23) <= 0.005 + 1e-12);
    CHECK(std::abs(g.sr - r.sr) <= 0.005 + 1e-12);
    CHECK(round_half_away(g.sr) == doctest::Approx(r.sr).epsilon(1e-12));
    s1 += g.r1;
    s23 += g.r23;
    ssr += g.sr;
  }
  CHECK(round_half_away(s1 / 21) == doctest::Approx(t.mean_r1));
  CHECK(round_half_away(s23 / 21) == doctest::Approx(t.mean_r23));
  CHECK(round_half_away(ssr / 21) == doctest::Approx(t.mean_sr));
  CHECK(t.mean_r1 == 0.82);
  CHECK(t.mean_r23 == 0.88);
  CHECK(t.mean_sr == 0.86);
}

TEST_CASE("sr examples") {
  CHECK(sr(1, 1, 1, 1, 1) == 1.0);
  CHECK(sr(0, 0, 0, 0, 0) == 0.0);
  auto p1 = GradeReport::from_cells(0.98, 0.50, 0.50, 1.00, 1.00);
  CHECK(p1.r1 == doctest::Approx(0.74));
  CHECK(round_half_away(p1.r23) == doctest::Approx(0.83));
  CHECK(p1.sr == doctest::Approx(0.8022222222));
  CHECK(round_half_away(sr(1, 1, 1, 1, 0.8)) == doctest::Approx(0.96));
  CHECK(round_half_away(sr(0.33, 0.17, 0.17, 0.33, 0.30)) == doctest::Approx(0.26));
  CHECK_THROWS_WITH_AS(sr(1.2, 0, 0, 0, 0), doctest::Contains("eval.domain"), Error);
  CHECK_THROWS_AS(sr(0, 0, 0, -0.1, 0), Error);
}

TEST_CASE("sr agrees with the formula on random cells") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng), e = u(rng);
    CHECK(sr(a, b, c, d, e) == doctest::Approx(formula(a, b, c, d, e)).epsilon(1e-12));
  }
}

TEST_CASE("display rounding is half away from zero") {
  CHECK(round_half_away(0.915) == 0.92);
  CHECK(round_half_away(0.125) == 0.13);
  CHECK(round_half_away(-0.125) == -0.13);
  CHECK(round_half_away(0.8333333) == 0.83);
  CHECK(round_half_away(0.020694, 4) == 0.0207);
}

TEST_CASE("cohort statistics of the SR column") {
  auto srs = printed_srs();
  auto st = cohort_stats(srs);
  CHECK(st.n == 21);
  CHECK(st.mean == doctest::Approx(oracle::mean(srs)).epsilon(1e-12));
  CHECK(st.sample_std == doctest::Approx(oracle::sample_std(srs)).epsilon(1e-12));
  CHECK(round_half_away(st.mean) == doctest::Approx(0.86));
  CHECK(round_half_away(st.sample_std, 4) == doctest::Approx(0.1879));
}

TEST_CASE("cohort statistics basics") {
  auto st = cohort_stats({0.5, 0.5});
  CHECK(st.mean == 0.5);
  CHECK(st.sample_std == 0.0);
  CHECK_THROWS_WITH_AS(cohort_stats({0.5}), doctest::Contains("stats.too-few"), Error);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> xs(100);
  for (auto& x : xs) x = u(rng);
  auto r = cohort_stats(xs);
  CHECK(std::abs(r.mean - oracle::mean(xs)) < 1e-12);
  CHECK(std::abs(r.sample_std - oracle::sample_std(xs)) < 1e-12);
}

TEST_CASE("sign test over the SR column at 0.84") {
  auto t = sign_test(printed_srs(), 0.84, 0.05);
  CHECK(t.n_equal == 1);
  CHECK(t.n_above == 15);
  CHECK(t.n_below == 5);
  CHECK(t.n_above + t.n_below == 20);
  CHECK(t.p_value == doctest::Approx(oracle::sign_test_upper(15, 20)).epsilon(1e-12));
  CHECK(t.p_value == doctest::Approx(21700.0 / 1048576.0).epsilon(1e-12));
  CHECK(std::abs(t.p_value - 0.0207) <= 0.0001);
  CHECK(t.reject);
}

TEST_CASE("sign test basics") {
  CHECK(sign_test({1, 1, 1}, 0).p_value == doctest::Approx(0.125));
  CHECK_THROWS_WITH_AS(sign_test({0.5}, 0.5), doctest::Contains("stats.all-ties"), Error);
  CHECK_THROWS_AS(sign_test({}, 0.5), Error);
  for (int n = 1; n <= 30; ++n) {
    for (int k = 0; k <= n + 1; ++k) {
      CHECK(binomial_upper_tail(k, n) == doctest::Approx(oracle::sign_test_upper(k, n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("report json round trip") {
  auto r = GradeReport::from_cells(0.98, 0.5, 0.5, 1, 1, "1");
  auto j = r.to_json();
  CHECK(j["display"]["sr"] == "0.80");
  auto back = GradeReport::from_json(j);
  CHECK(back.sr == r.sr);
  CHECK(back.participant == "1");
  j["a"] = 1.5;
  CHECK_THROWS_WITH_AS(GradeReport::from_json(j), doctest::Contains("eval.domain"), Error);
  CHECK_THROWS_AS(GradeReport::from_json(json{{"a", 1}}), Error);
}

TEST_CASE("format_table renders a mean row") {
  std::vector<GradeReport> rows;
  for (const auto& r : paper_table().rows) rows.push_back(GradeReport::from_cells(r.a, r.b, r.c, r.d, r.e));
  auto text = format_table(rows);
  CHECK(text.rfind("PS.", 0) == 0);
  auto last = text.substr(text.rfind('%'));
  CHECK(last.find("0.82") != std::string::npos);
  CHECK(last.find("0.88") != std::string::npos);
  CHECK(last.find("0.86") != std::string::npos);
}

TEST_CASE("rubric loading") {
  auto r = museum_rubric();
  CHECK(r.expected_poi_count == 12);
  CHECK(r.expected_link_count == 11);
  CHECK(r.tolerance == 0.05);
  CHECK_NOTHROW(r.check());
  r.expected_link_count = 10;
  CHECK_THROWS_WITH_AS(r.check(), doctest::Contains("rubric.invalid"), Error);
}

TEST_CASE("the reference grades perfectly") {
  auto rubric = museum_rubric();
  auto cache = fixture::museum_cache();
  auto g = grade(rubric.reference, rubric, {&cache, &fixture::museum_corpus()});
  CHECK(g.a == 1.0);
  CHECK(g.b == 1.0);
  CHECK(g.c == 1.0);
  CHECK(g.d == 1.0);
  CHECK(g.e == 1.0);
  CHECK(g.sr == 1.0);
}

TEST_CASE("grading counts missing and misplaced work") {
  auto rubric = museum_rubric();
  auto cache = fixture::museum_cache();
  GradeOptions opts{&cache, &fixture::museum_corpus()};

  SUBCASE("a missing PoI") {
    auto cand = rubric.reference;
    cand.space->pois.pop_back();
    cand.space->links.pop_back();
    auto g = grade(cand, rubric, opts);
    CHECK(g.a == doctest::Approx(44.0 / 48));
    CHECK(g.d == doctest::Approx(11.0 / 12));
    CHECK(g.e == doctest::Approx(10.0 / 11));
    CHECK(g.b == doctest::Approx(11.0 / 12));
    CHECK(g.c == doctest::Approx(11.0 / 12));
  }
  SUBCASE("a PoI placed outside the tolerance") {
    auto cand = rubric.reference;
    // diagonal 50, tolerance 2.5
    cand.space->pois[0].position.x += 3;
    auto g = grade(cand, rubric, opts);
    CHECK(g.a == doctest::Approx(44.0 / 48));
    CHECK(g.d == 1.0);
  }
  SUBCASE("a PoI placed inside the tolerance") {
    auto cand = rubric.reference;
    cand.space->pois[0].position.x += 2;
    CHECK(grade(cand, rubric, opts).a == 1.0);
  }
  SUBCASE("a reversed link") {
    auto cand = rubric.reference;
    std::swap(cand.space->links[10].from, cand.space->links[10].to);
    CHECK(grade(cand, rubric, opts).e == doctest::Approx(10.0 / 11));
  }
  SUBCASE("the nav augmenter anchored elsewhere") {
    auto cand = rubric.reference;
    cand.layers[0].augmenters[1].anchor = "//div[@id='footer']";
    auto g = grade(cand, rubric, opts);
    CHECK(g.c == 0.0);
    CHECK(g.b == 1.0);
  }
  SUBCASE("an equivalent anchor written differently") {
    auto cand = rubric.reference;
    cand.layers[0].augmenters[0].anchor = "//div[@id='content']/h1";
    CHECK(grade(cand, rubric, opts).b == 1.0);
  }
  SUBCASE("the panel bound to the wrong text") {
    auto cand = rubric.reference;
    cand.layers[0].augmenters[0].params[1].second = PoiFieldRef{PoiField::name};
    CHECK(grade(cand, rubric, opts).b == doctest::Approx(0.5));
  }
}

TEST_CASE("a literal prop matches its extracted value only with a cache") {
  auto rubric = museum_rubric();
  auto cache = fixture::museum_cache();
  auto cand = rubric.reference;
  auto& p1 = cand.space->pois[0];
  for (auto& prop : p1.props) {
    if (prop.name == "poi-desc") prop.source = LiteralValue{resolve_property(prop.source, &cache)};
  }
  CHECK(grade(cand, rubric, {&cache, nullptr}).a == 1.0);
  CHECK(grade(cand, rubric, {}).a == doctest::Approx(47.0 / 48));
}
