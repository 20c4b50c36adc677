#pragma once

// Deliberately naive reference implementations used to cross-check the
// library. None of these share code with src/.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mowa/html.hpp"

namespace oracle {

// ---- XPath ----------------------------------------------------------------

struct OStep {
  bool descendant = false;
  std::string test;  // tag, "*" or "text()"
  // Each predicate is either a position (>0) or attr=value.
  struct Pred {
    size_t pos = 0;
    std::string attr, value;
  };
  std::vector<Pred> preds;
};

struct OExpr {
  std::vector<OStep> steps;
  std::string attr;  // trailing /@attr, empty when absent
};

inline void preorder(const mowa::html::Node* n, std::vector<const mowa::html::Node*>& out) {
  out.push_back(n);
  for (const auto& c : n->children()) preorder(c.get(), out);
}

inline bool node_test(const mowa::html::Node* n, const std::string& test) {
  if (test == "text()") return n->is_text();
  if (!n->is_element()) return false;
  return test == "*" || n->tag() == test;
}

// Step semantics straight from the XPath 1.0 abbreviations:
// `/x` is child::x, `//x` is /descendant-or-self::node()/child::x, and
// predicates filter each parent's candidate list in turn.
inline std::vector<const mowa::html::Node*> run(const mowa::html::Document& doc, const OExpr& e) {
  std::vector<const mowa::html::Node*> order;
  preorder(&doc.document_node(), order);
  std::map<const mowa::html::Node*, size_t> rank;
  for (size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  std::vector<const mowa::html::Node*> ctx{&doc.document_node()};
  for (const auto& step : e.steps) {
    std::vector<const mowa::html::Node*> parents;
    for (const auto* c : ctx) {
      if (step.descendant) {
        preorder(c, parents);
      } else {
        parents.push_back(c);
      }
    }
    std::vector<const mowa::html::Node*> next;
    for (const auto* p : parents) {
      std::vector<const mowa::html::Node*> cand;
      for (const auto& ch : p->children()) {
        if (node_test(ch.get(), step.test)) cand.push_back(ch.get());
      }
      for (const auto& pred : step.preds) {
        std::vector<const mowa::html::Node*> kept;
        for (size_t i = 0; i < cand.size(); ++i) {
          if (pred.pos > 0) {
            if (i + 1 == pred.pos) kept.push_back(cand[i]);
          } else {
            const std::string* v = cand[i]->attribute(pred.attr);
            if (v && *v == pred.value) kept.push_back(cand[i]);
          }
        }
        cand = kept;
      }
      next.insert(next.end(), cand.begin(), cand.end());
    }
    std::sort(next.begin(), next.end(), [&](auto* a, auto* b) { return rank[a] < rank[b]; });
    next.erase(std::unique(next.begin(), next.end()), next.end());
    ctx = next;
  }
  if (!e.attr.empty()) {
    std::erase_if(ctx, [&](const mowa::html::Node* n) { return !n->is_element() || !n->attribute(e.attr); });
  }
  return ctx;
}

inline std::string render(const OExpr& e) {
  std::string s;
  for (const auto& st : e.steps) {
    s += st.descendant ? "//" : "/";
    s += st.test;
    for (const auto& p : st.preds) {
      if (p.pos > 0) {
        s += "[" + std::to_string(p.pos) + "]";
      } else {
        s += "[@" + p.attr + "='" + p.value + "']";
      }
    }
  }
  if (!e.attr.empty()) s += "/@" + e.attr;
  return s;
}

// ---- Geometry ---------------------------------------------------------------

inline double haversine_m(double lat1, double lon1, double lat2, double lon2) {
  const double r = 6371008.8;
  const double rad = M_PI / 180.0;
  double dlat = (lat2 - lat1) * rad;
  double dlon = (lon2 - lon1) * rad;
  double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
             std::cos(lat1 * rad) * std::cos(lat2 * rad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2 * r * std::asin(std::min(1.0, std::sqrt(h)));
}

struct OPoi {
  std::string id;
  double x, y;
  int order;
};

// (x, y) are (longitude, latitude) when geographic. Scans every candidate;
// returns the closest within radius, ties broken by lower order, then id.
inline std::optional<std::string> nearest(const std::vector<OPoi>& pois, double x, double y, double radius,
                                          bool geographic) {
  std::optional<std::string> best;
  double best_d = 0;
  int best_order = 0;
  for (const auto& p : pois) {
    double d = geographic ? haversine_m(y, x, p.y, p.x) : std::hypot(p.x - x, p.y - y);
    if (d > radius) continue;
    bool better = !best || d < best_d || (d == best_d && (p.order < best_order || (p.order == best_order && p.id < *best)));
    if (better) {
      best = p.id;
      best_d = d;
      best_order = p.order;
    }
  }
  return best;
}

struct OBand {
  std::string id;
  double min, max;
};

inline std::optional<std::string> band_of(const std::vector<OBand>& bands, double v) {
  for (const auto& b : bands) {
    if (v >= b.min && v < b.max) return b.id;
  }
  return std::nullopt;
}

// ---- Statistics -------------------------------------------------------------

inline double mean(const std::vector<double>& xs) {
  double s = 0;
  for (double x : xs) s += x;
  return s / xs.size();
}

// Two-pass sample standard deviation.
inline double sample_std(const std::vector<double>& xs) {
  double m = mean(xs);
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / (xs.size() - 1));
}

// One-sided exact sign test P(X >= k), X ~ Bin(n, 1/2), via Pascal's triangle
// in exact integers.
inline double sign_test_upper(int k, int n) {
  std::vector<unsigned long long> row{1};
  for (int i = 0; i < n; ++i) {
    std::vector<unsigned long long> nr(row.size() + 1, 0);
    for (size_t j = 0; j < row.size(); ++j) {
      nr[j] += row[j];
      nr[j + 1] += row[j];
    }
    row = nr;
  }
  unsigned long long tail = 0;
  for (int j = k; j <= n; ++j) tail += row[j];
  return static_cast<double>(tail) / std::ldexp(1.0, n);
}

}  // namespace oracle
