#pragma once

#include <set>
#include <string>
#include <vector>

#include "mowa/error.hpp"
#include "mowa/spec.hpp"

namespace mowa {

enum class Severity { error, warning };
std::string_view to_string(Severity s);

struct Issue {
  Severity severity = Severity::error;
  std::string path;
  std::string key;
  std::string message;
  Error::Args args;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Issue> issues;

  size_t error_count() const;
  bool has(std::string_view key) const;
  void merge(ValidationReport other);
};

struct ValidationOptions {
  // Normalized URLs of every known corpus/cache page; enables the
  // "extract URL not in any corpus" warning when set.
  const std::set<std::string>* known_urls = nullptr;
  std::string locale = "en";
};

// The six authoring stages, in the order the wizard gates them.
enum class Stage { base_data = 1, context_types, sensors, values_of_interest, layers, rules };
inline constexpr int kStageCount = 6;

// Checks every model invariant. Pure and total.
ValidationReport validate_spec(const MobileAppSpec& spec, const ValidationOptions& options = {});

// Invariants scoped to one stage plus that stage's completeness rules
// (e.g. at least one sensor at stage 3).
ValidationReport validate_stage(const MobileAppSpec& spec, Stage stage, const ValidationOptions& options = {});

}  // namespace mowa
