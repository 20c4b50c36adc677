#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mowa/extractor.hpp"
#include "mowa/spec.hpp"
#include "mowa/weaver.hpp"

namespace mowa::eval {

// Half away from zero, to `digits` decimals. Inputs that sit on a printed
// boundary up to floating noise (0.915 stored as 0.91499999...) round up.
double round_half_away(double x, int digits = 2);

// ((a+b)/2 + 2*(c+d+e)/3) / 3, unrounded. Throws Error("eval.domain").
double sr(double a, double b, double c, double d, double e);

struct GradeReport {
  std::string participant;
  double a = 0, b = 0, c = 0, d = 0, e = 0;
  double r1 = 0;
  double r23 = 0;
  double sr = 0;

  static GradeReport from_cells(double a, double b, double c, double d, double e, std::string participant = {});
  nlohmann::json to_json() const;
  // Throws Error("payload.invalid") on missing or out-of-range fields.
  static GradeReport from_json(const nlohmann::json& j);
};

struct Rubric {
  MobileAppSpec reference;
  int expected_poi_count = 12;
  int expected_link_count = 11;
  std::vector<std::string> required_props{"poi-desc", "poi-pic"};
  // Fraction of the space diagonal within which a PoI counts as placed.
  double tolerance = 0.05;

  // {"reference": <path relative to the rubric>, "expected_poi_count": ..,
  //  "expected_link_count": .., "required_props": [..], "tolerance": ..}
  static Rubric load(const std::string& path);
  // Throws Error("rubric.invalid") when the reference does not validate or the
  // counts disagree with it.
  void check() const;
};

struct GradeOptions {
  // Resolve props and bindings to values when present; otherwise compare
  // their sources structurally.
  ExtractCache* cache = nullptr;
  // Resolve anchors against the real pages when present.
  const PageCorpus* corpus = nullptr;
};

GradeReport grade(const MobileAppSpec& candidate, const Rubric& rubric, const GradeOptions& options = {});

struct Stats {
  size_t n = 0;
  double mean = 0;
  double sample_std = 0;
};

// Throws Error("stats.too-few") for fewer than two values.
Stats cohort_stats(const std::vector<double>& values);

struct SignTestResult {
  double hypothesized_median = 0;
  int n_below = 0;
  int n_equal = 0;
  int n_above = 0;
  double p_value = 1;
  double alpha = 0.05;
  bool reject = false;
};

inline constexpr double kTieEpsilon = 1e-9;

// One-sided exact binomial test of "median > m". Ties within kTieEpsilon are
// dropped. Throws Error("stats.all-ties") or Error("stats.too-few") when empty.
SignTestResult sign_test(const std::vector<double>& values, double median, double alpha = 0.05);

// P(X >= k) for X ~ Binomial(n, 1/2).
double binomial_upper_tail(int k, int n);

// Aligned text table with the Table 2 columns plus a mean row.
std::string format_table(const std::vector<GradeReport>& reports);

}  // namespace mowa::eval
