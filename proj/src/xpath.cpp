#include "mowa/xpath.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <unordered_map>

#include "mowa/error.hpp"

namespace mowa::xpath {
namespace {

using html::Node;

[[noreturn]] void fail(std::string_view text, size_t pos, std::string_view why) {
  throw Error("xpath.syntax", {{"xpath", std::string(text)}, {"at", std::to_string(pos)}, {"reason", std::string(why)}});
}

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == ':';
}

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  void run(std::vector<Step>& steps, std::optional<std::string>& attribute) {
    if (text_.empty()) fail(text_, 0, "empty expression");
    if (text_[0] != '/') fail(text_, 0, "expression must be absolute");
    while (pos_ < text_.size()) {
      Axis axis = Axis::child;
      expect('/');
      if (peek() == '/') {
        ++pos_;
        axis = Axis::descendant;
      }
      if (peek() == '@') {
        if (axis != Axis::child || steps.empty()) fail(text_, pos_, "attribute selector must follow a step");
        ++pos_;
        attribute = read_name();
        if (pos_ != text_.size()) fail(text_, pos_, "attribute selector must be last");
        return;
      }
      steps.push_back(read_step(axis));
    }
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c) {
    if (peek() != c) fail(text_, pos_, std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string read_name() {
    if (!name_start(peek())) fail(text_, pos_, "expected a name");
    size_t start = pos_;
    while (pos_ < text_.size() && name_char(text_[pos_])) ++pos_;
    std::string out(text_.substr(start, pos_ - start));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  }

  Step read_step(Axis axis) {
    Step step;
    step.axis = axis;
    if (peek() == '*') {
      ++pos_;
      step.test = NodeTest::any_element;
    } else {
      std::string name = read_name();
      if (name == "text" && peek() == '(') {
        ++pos_;
        expect(')');
        step.test = NodeTest::text;
      } else {
        step.test = NodeTest::name;
        step.name = std::move(name);
      }
    }
    while (peek() == '[') {
      ++pos_;
      step.predicates.push_back(read_predicate());
      expect(']');
    }
    return step;
  }

  Predicate read_predicate() {
    if (peek() == '@') {
      ++pos_;
      AttrEquals eq;
      eq.name = read_name();
      expect('=');
      char quote = peek();
      if (quote != '\'' && quote != '"') fail(text_, pos_, "expected quoted value");
      ++pos_;
      size_t end = text_.find(quote, pos_);
      if (end == std::string_view::npos) fail(text_, pos_, "unterminated string");
      eq.value = std::string(text_.substr(pos_, end - pos_));
      pos_ = end + 1;
      return eq;
    }
    size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    size_t n = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, n);
    if (start == pos_ || ec != std::errc{} || n == 0) fail(text_, start, "expected a positive position or @attr='value'");
    return n;
  }

  std::string_view text_;
  size_t pos_ = 0;
};

bool test_matches(const Step& step, const Node& n) {
  switch (step.test) {
    case NodeTest::text: return n.is_text();
    case NodeTest::any_element: return n.is_element();
    case NodeTest::name: return n.is_element() && n.tag() == step.name;
  }
  return false;
}

// Applies the step's test and predicates to one parent's children.
void select_children(const Node& parent, const Step& step, std::vector<const Node*>& out) {
  std::vector<const Node*> picked;
  for (const auto& c : parent.children()) {
    if (test_matches(step, *c)) picked.push_back(c.get());
  }
  for (const auto& pred : step.predicates) {
    std::vector<const Node*> kept;
    if (const auto* pos = std::get_if<size_t>(&pred)) {
      if (*pos <= picked.size()) kept.push_back(picked[*pos - 1]);
    } else {
      const auto& eq = std::get<AttrEquals>(pred);
      for (const Node* n : picked) {
        const std::string* v = n->attribute(eq.name);
        if (v && *v == eq.value) kept.push_back(n);
      }
    }
    picked = std::move(kept);
  }
  out.insert(out.end(), picked.begin(), picked.end());
}

void collect_self_and_descendants(const Node& n, std::vector<const Node*>& out) {
  out.push_back(&n);
  for (const auto& c : n.children()) collect_self_and_descendants(*c, out);
}

void index_preorder(const Node& n, std::unordered_map<const Node*, size_t>& order) {
  order.emplace(&n, order.size());
  for (const auto& c : n.children()) index_preorder(*c, order);
}

}  // namespace

Expr Expr::parse(std::string_view text) {
  Expr e;
  ExprParser(text).run(e.steps_, e.attribute_);
  if (e.steps_.empty()) fail(text, 0, "at least one step required");
  return e;
}

bool Expr::valid(std::string_view text) {
  try {
    parse(text);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::string Expr::str() const {
  std::string out;
  for (const auto& s : steps_) {
    out += s.axis == Axis::descendant ? "//" : "/";
    switch (s.test) {
      case NodeTest::text: out += "text()"; break;
      case NodeTest::any_element: out += "*"; break;
      case NodeTest::name: out += s.name; break;
    }
    for (const auto& p : s.predicates) {
      if (const auto* n = std::get_if<size_t>(&p)) {
        out += "[" + std::to_string(*n) + "]";
      } else {
        const auto& eq = std::get<AttrEquals>(p);
        char q = eq.value.find('\'') == std::string::npos ? '\'' : '"';
        out += "[@" + eq.name + "=" + q + eq.value + q + "]";
      }
    }
  }
  if (attribute_) out += "/@" + *attribute_;
  return out;
}

std::vector<Match> evaluate(const html::Document& doc, const Expr& expr) {
  std::vector<const Node*> context{&doc.document_node()};
  for (const auto& step : expr.steps()) {
    std::vector<const Node*> parents;
    if (step.axis == Axis::descendant) {
      for (const Node* c : context) collect_self_and_descendants(*c, parents);
    } else {
      parents = context;
    }
    std::vector<const Node*> next;
    for (const Node* p : parents) select_children(*p, step, next);
    if (step.axis == Axis::descendant || context.size() > 1) {
      std::unordered_map<const Node*, size_t> order;
      index_preorder(doc.document_node(), order);
      std::sort(next.begin(), next.end(), [&](const Node* a, const Node* b) { return order.at(a) < order.at(b); });
      next.erase(std::unique(next.begin(), next.end()), next.end());
    }
    context = std::move(next);
    if (context.empty()) break;
  }

  std::vector<Match> out;
  out.reserve(context.size());
  for (const Node* n : context) {
    if (expr.attribute()) {
      const std::string* v = n->attribute(*expr.attribute());
      if (v) out.push_back({n, *v});
    } else {
      out.push_back({n, std::nullopt});
    }
  }
  return out;
}

std::vector<const html::Node*> select(const html::Document& doc, const Expr& expr) {
  std::vector<const Node*> out;
  for (const auto& m : evaluate(doc, expr)) out.push_back(m.node);
  return out;
}

std::vector<html::Node*> select(html::Document& doc, const Expr& expr) {
  std::vector<html::Node*> out;
  for (const auto& m : evaluate(doc, expr)) out.push_back(const_cast<html::Node*>(m.node));
  return out;
}

}  // namespace mowa::xpath
