#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mowa/html.hpp"

namespace mowa::xpath {

enum class Axis { child, descendant };
enum class NodeTest { name, any_element, text };

struct AttrEquals {
  std::string name;
  std::string value;
  bool operator==(const AttrEquals&) const = default;
};

// 1-based position among the nodes a step selects under one parent.
using Predicate = std::variant<size_t, AttrEquals>;

struct Step {
  Axis axis = Axis::child;
  NodeTest test = NodeTest::name;
  std::string name;
  std::vector<Predicate> predicates;
  bool operator==(const Step&) const = default;
};

// Absolute location path over the supported subset:
//   ('/' | '//') step (('/' | '//') step)* ('/@' name)?
//   step := name | '*' | 'text()' followed by [n] or [@a='v'] predicates
class Expr {
 public:
  // Throws Error("xpath.syntax") for anything outside the subset.
  static Expr parse(std::string_view text);
  static bool valid(std::string_view text);

  const std::vector<Step>& steps() const noexcept { return steps_; }
  const std::optional<std::string>& attribute() const noexcept { return attribute_; }

  // Canonical rendering; parse(str()) == *this.
  std::string str() const;

  bool operator==(const Expr&) const = default;

 private:
  std::vector<Step> steps_;
  std::optional<std::string> attribute_;
};

struct Match {
  const html::Node* node = nullptr;
  // Set when the expression ends in an attribute selector.
  std::optional<std::string> attribute_value;
};

// Results in document order, without duplicates. Elements lacking the
// trailing attribute are dropped.
std::vector<Match> evaluate(const html::Document& doc, const Expr& expr);

// Node-only view; with a trailing attribute selector the owning elements are
// returned.
std::vector<const html::Node*> select(const html::Document& doc, const Expr& expr);
std::vector<html::Node*> select(html::Document& doc, const Expr& expr);

}  // namespace mowa::xpath
