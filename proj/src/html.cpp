#include "mowa/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

#include "mowa/error.hpp"

namespace mowa::html {
namespace {

constexpr std::array<std::string_view, 14> kVoidElements = {
    "area", "base", "br", "col", "embed", "hr", "img",
    "input", "link", "meta", "param", "source", "track", "wbr"};

bool is_raw_text(std::string_view tag) { return tag == "script" || tag == "style"; }
bool is_rcdata(std::string_view tag) { return tag == "title" || tag == "textarea"; }

char lower_char(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower_char);
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool iequals_prefix(std::string_view text, size_t pos, std::string_view prefix) {
  if (text.size() - pos < prefix.size()) return false;
  for (size_t i = 0; i < prefix.size(); ++i) {
    if (lower_char(text[pos + i]) != prefix[i]) return false;
  }
  return true;
}

void append_utf8(std::string& out, uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Tries to decode a character reference starting at text[pos] == '&'.
// On success appends the decoded text and returns the consumed length.
size_t decode_reference(std::string_view text, size_t pos, std::string* out) {
  static constexpr std::array<std::pair<std::string_view, char>, 5> kNamed = {{
      {"amp;", '&'}, {"lt;", '<'}, {"gt;", '>'}, {"quot;", '"'}, {"apos;", '\''}}};
  std::string_view rest = text.substr(pos + 1);
  for (const auto& [name, ch] : kNamed) {
    if (rest.starts_with(name)) {
      if (out) *out += ch;
      return name.size() + 1;
    }
  }
  if (rest.size() < 3 || rest[0] != '#') return 0;
  bool hex = rest[1] == 'x' || rest[1] == 'X';
  size_t digits_start = hex ? 2 : 1;
  size_t semi = rest.find(';', digits_start);
  if (semi == std::string_view::npos || semi == digits_start || semi - digits_start > 8) return 0;
  uint32_t cp = 0;
  auto [ptr, ec] = std::from_chars(rest.data() + digits_start, rest.data() + semi, cp, hex ? 16 : 10);
  if (ec != std::errc{} || ptr != rest.data() + semi) return 0;
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  if (out) append_utf8(*out, cp);
  return semi + 2;
}

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size();) {
    if (text[i] == '&') {
      if (size_t n = decode_reference(text, i, &out); n > 0) {
        i += n;
        continue;
      }
    }
    out += text[i++];
  }
  return out;
}

// Minimal escaping: `&` only when a re-parse would otherwise decode it.
void escape_into(std::string& out, std::string_view text, bool attribute) {
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    switch (c) {
      case '&':
        out += decode_reference(text, i, nullptr) > 0 ? "&amp;" : "&";
        break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        out += attribute ? "&quot;" : "\"";
        break;
      default: out += c;
    }
  }
}

class Parser {
 public:
  Parser(std::string_view input, Document& doc) : in_(input), doc_(doc) {
    stack_.push_back(&doc_.root());
  }

  void run() {
    while (pos_ < in_.size()) {
      if (in_[pos_] == '<' && try_markup()) continue;
      size_t next = in_.find('<', pos_ + 1);
      if (next == std::string_view::npos) next = in_.size();
      add_text(decode_entities(in_.substr(pos_, next - pos_)));
      pos_ = next;
    }
  }

 private:
  Node* current() const { return stack_.back(); }

  void add_text(std::string text) {
    if (text.empty()) return;
    Node* cur = current();
    if (!seen_html_tag_ && cur == &doc_.root() && cur->child_count() == 0 &&
        std::all_of(text.begin(), text.end(), is_space)) {
      return;
    }
    if (cur->child_count() > 0) {
      Node* last = cur->child(cur->child_count() - 1);
      if (last->is_text()) {
        last->set_data(last->data() + text);
        return;
      }
    }
    cur->append_child(Node::text(std::move(text)));
  }

  // Returns false when the `<` should be treated as literal text.
  bool try_markup() {
    std::string_view rest = in_.substr(pos_);
    if (rest.starts_with("<!--")) {
      size_t end = in_.find("-->", pos_ + 4);
      std::string_view body = end == std::string_view::npos ? in_.substr(pos_ + 4) : in_.substr(pos_ + 4, end - pos_ - 4);
      current()->append_child(Node::comment(std::string(body)));
      pos_ = end == std::string_view::npos ? in_.size() : end + 3;
      return true;
    }
    if (rest.starts_with("<!") || rest.starts_with("<?")) {
      size_t end = in_.find('>', pos_ + 2);
      if (iequals_prefix(in_, pos_, "<!doctype") && !doc_.doctype()) {
        std::string_view body = in_.substr(pos_ + 9, (end == std::string_view::npos ? in_.size() : end) - pos_ - 9);
        size_t b = 0, e = body.size();
        while (b < e && is_space(body[b])) ++b;
        while (e > b && is_space(body[e - 1])) --e;
        doc_.set_doctype(std::string(body.substr(b, e - b)));
      }
      pos_ = end == std::string_view::npos ? in_.size() : end + 1;
      return true;
    }
    if (rest.size() >= 3 && rest[1] == '/' && is_alpha(rest[2])) return end_tag();
    if (rest.size() >= 2 && is_alpha(rest[1])) return start_tag();
    return false;
  }

  std::string read_name(size_t& p) const {
    size_t start = p;
    while (p < in_.size() && !is_space(in_[p]) && in_[p] != '/' && in_[p] != '>') ++p;
    return to_lower(in_.substr(start, p - start));
  }

  bool end_tag() {
    size_t p = pos_ + 2;
    std::string name = read_name(p);
    size_t close = in_.find('>', p);
    pos_ = close == std::string_view::npos ? in_.size() : close + 1;
    if (name == "html") return true;
    for (size_t i = stack_.size(); i-- > 1;) {
      if (stack_[i]->tag() == name) {
        stack_.resize(i);
        break;
      }
    }
    return true;
  }

  bool start_tag() {
    size_t p = pos_ + 1;
    std::string name = read_name(p);
    std::vector<Attribute> attrs;
    bool self_closing = false;
    bool closed = false;
    while (p < in_.size()) {
      while (p < in_.size() && is_space(in_[p])) ++p;
      if (p >= in_.size()) break;
      if (in_[p] == '>') {
        ++p;
        closed = true;
        break;
      }
      if (in_[p] == '/') {
        if (p + 1 < in_.size() && in_[p + 1] == '>') {
          self_closing = true;
          p += 2;
          closed = true;
          break;
        }
        ++p;
        continue;
      }
      size_t name_start = p;
      while (p < in_.size() && !is_space(in_[p]) && in_[p] != '=' && in_[p] != '>' &&
             !(in_[p] == '/' && p + 1 < in_.size() && in_[p + 1] == '>')) {
        ++p;
      }
      if (p == name_start) {  // lone '='
        ++p;
        continue;
      }
      std::string attr_name = to_lower(in_.substr(name_start, p - name_start));
      std::string value;
      size_t q = p;
      while (q < in_.size() && is_space(in_[q])) ++q;
      if (q < in_.size() && in_[q] == '=') {
        p = q + 1;
        while (p < in_.size() && is_space(in_[p])) ++p;
        if (p < in_.size() && (in_[p] == '"' || in_[p] == '\'')) {
          char quote = in_[p++];
          size_t end = in_.find(quote, p);
          if (end == std::string_view::npos) end = in_.size();
          value = decode_entities(in_.substr(p, end - p));
          p = end == in_.size() ? end : end + 1;
        } else {
          size_t start = p;
          while (p < in_.size() && !is_space(in_[p]) && in_[p] != '>') ++p;
          value = decode_entities(in_.substr(start, p - start));
        }
      }
      bool duplicate = std::any_of(attrs.begin(), attrs.end(),
                                   [&](const Attribute& a) { return a.name == attr_name; });
      if (!duplicate) attrs.push_back({std::move(attr_name), std::move(value)});
    }
    if (!closed) return false;  // unterminated tag: rest is text
    pos_ = p;

    if (name == "html") {
      seen_html_tag_ = true;
      for (auto& a : attrs) {
        if (!doc_.root().attribute(a.name)) doc_.root().set_attribute(a.name, std::move(a.value));
      }
      return true;
    }

    auto_close(name);
    Node* el = current()->append_child(Node::element(name, std::move(attrs)));
    if (is_void_element(name) || self_closing) return true;
    if (is_raw_text(name) || is_rcdata(name)) {
      read_text_content(el, is_rcdata(name));
      return true;
    }
    stack_.push_back(el);
    return true;
  }

  void read_text_content(Node* el, bool decode) {
    size_t search = pos_;
    size_t end = in_.size();
    while (true) {
      size_t lt = in_.find("</", search);
      if (lt == std::string_view::npos) break;
      size_t after = lt + 2 + el->tag().size();
      if (iequals_prefix(in_, lt + 2, el->tag()) &&
          (after >= in_.size() || is_space(in_[after]) || in_[after] == '>' || in_[after] == '/')) {
        end = lt;
        break;
      }
      search = lt + 2;
    }
    std::string_view body = in_.substr(pos_, end - pos_);
    if (!body.empty()) el->append_child(Node::text(decode ? decode_entities(body) : std::string(body)));
    if (end == in_.size()) {
      pos_ = end;
    } else {
      size_t close = in_.find('>', end);
      pos_ = close == std::string_view::npos ? in_.size() : close + 1;
    }
  }

  void close_nearest(std::initializer_list<std::string_view> targets,
                     std::initializer_list<std::string_view> boundaries) {
    for (size_t i = stack_.size(); i-- > 1;) {
      const std::string& tag = stack_[i]->tag();
      if (std::find(targets.begin(), targets.end(), tag) != targets.end()) {
        stack_.resize(i);
        return;
      }
      if (std::find(boundaries.begin(), boundaries.end(), tag) != boundaries.end()) return;
    }
  }

  void auto_close(std::string_view tag) {
    if (tag == "p") {
      close_nearest({"p"}, {"div", "section", "article", "li", "td", "th", "body", "table", "blockquote", "button"});
    } else if (tag == "li") {
      close_nearest({"li"}, {"ul", "ol", "menu"});
    } else if (tag == "td" || tag == "th") {
      close_nearest({"td", "th"}, {"tr", "table"});
    } else if (tag == "tr") {
      close_nearest({"tr"}, {"table", "tbody", "thead", "tfoot"});
    }
  }

  std::string_view in_;
  Document& doc_;
  size_t pos_ = 0;
  std::vector<Node*> stack_;
  bool seen_html_tag_ = false;
};

void serialize_into(std::string& out, const Node& node) {
  switch (node.kind()) {
    case NodeKind::document:
      for (const auto& c : node.children()) serialize_into(out, *c);
      return;
    case NodeKind::text: {
      const Node* parent = node.parent();
      if (parent && is_raw_text(parent->tag())) {
        out += node.data();
      } else {
        escape_into(out, node.data(), false);
      }
      return;
    }
    case NodeKind::comment:
      out += "<!--";
      out += node.data();
      out += "-->";
      return;
    case NodeKind::element:
      out += '<';
      out += node.tag();
      for (const auto& a : node.attributes()) {
        out += ' ';
        out += a.name;
        out += "=\"";
        escape_into(out, a.value, true);
        out += '"';
      }
      out += '>';
      if (is_void_element(node.tag())) return;
      for (const auto& c : node.children()) serialize_into(out, *c);
      out += "</";
      out += node.tag();
      out += '>';
      return;
  }
}

bool is_marker(std::string_view name) { return name.starts_with(kMarkerPrefix); }

// Child list with adjacent text runs merged and empty text dropped.
struct Flat {
  const Node* node = nullptr;
  std::string text;
};

std::vector<Flat> flatten(const Node& n) {
  std::vector<Flat> out;
  for (const auto& c : n.children()) {
    if (c->is_text()) {
      if (c->data().empty()) continue;
      if (!out.empty() && out.back().node == nullptr) {
        out.back().text += c->data();
      } else {
        out.push_back({nullptr, c->data()});
      }
    } else {
      out.push_back({c.get(), {}});
    }
  }
  return out;
}

std::vector<Attribute> comparable_attrs(const Node& n, bool ignore_markers) {
  std::vector<Attribute> out;
  for (const auto& a : n.attributes()) {
    if (!ignore_markers || !is_marker(a.name)) out.push_back(a);
  }
  return out;
}

void strip_node(Node& node, std::string_view layer_id) {
  auto matches = [&](const std::string* v) { return v && (layer_id.empty() || *v == layer_id); };
  for (size_t i = node.child_count(); i-- > 0;) {
    Node* c = node.child(i);
    if (!c->is_element()) continue;
    if (matches(c->attribute(kLayerAttr))) {
      node.remove_child(i);
      continue;
    }
    if (matches(c->attribute(kEditAttr))) {
      std::vector<std::string> doomed;
      for (const auto& a : c->attributes()) {
        if (is_marker(a.name)) doomed.push_back(a.name);
      }
      for (const auto& name : doomed) c->remove_attribute(name);
    }
    strip_node(*c, layer_id);
  }
}

}  // namespace

// --- Node ------------------------------------------------------------------

std::unique_ptr<Node> Node::element(std::string tag, std::vector<Attribute> attrs) {
  std::unique_ptr<Node> n(new Node(NodeKind::element));
  n->tag_ = std::move(tag);
  n->attrs_ = std::move(attrs);
  return n;
}

std::unique_ptr<Node> Node::text(std::string content) {
  std::unique_ptr<Node> n(new Node(NodeKind::text));
  n->data_ = std::move(content);
  return n;
}

std::unique_ptr<Node> Node::comment(std::string content) {
  std::unique_ptr<Node> n(new Node(NodeKind::comment));
  n->data_ = std::move(content);
  return n;
}

const std::string* Node::attribute(std::string_view name) const {
  for (const auto& a : attrs_) {
    if (a.name == name) return &a.value;
  }
  return nullptr;
}

void Node::set_attribute(std::string_view name, std::string value) {
  for (auto& a : attrs_) {
    if (a.name == name) {
      a.value = std::move(value);
      return;
    }
  }
  attrs_.push_back({std::string(name), std::move(value)});
}

bool Node::remove_attribute(std::string_view name) {
  auto it = std::find_if(attrs_.begin(), attrs_.end(), [&](const Attribute& a) { return a.name == name; });
  if (it == attrs_.end()) return false;
  attrs_.erase(it);
  return true;
}

size_t Node::index_in_parent() const {
  if (!parent_) return 0;
  const auto& sibs = parent_->children_;
  for (size_t i = 0; i < sibs.size(); ++i) {
    if (sibs[i].get() == this) return i;
  }
  return 0;
}

Node* Node::append_child(std::unique_ptr<Node> child) {
  return insert_child(children_.size(), std::move(child));
}

Node* Node::insert_child(size_t index, std::unique_ptr<Node> child) {
  child->parent_ = this;
  Node* raw = child.get();
  children_.insert(children_.begin() + static_cast<std::ptrdiff_t>(std::min(index, children_.size())),
                   std::move(child));
  return raw;
}

std::unique_ptr<Node> Node::remove_child(size_t index) {
  std::unique_ptr<Node> out = std::move(children_.at(index));
  children_.erase(children_.begin() + static_cast<std::ptrdiff_t>(index));
  out->parent_ = nullptr;
  return out;
}

std::vector<std::unique_ptr<Node>> Node::take_children() {
  auto out = std::move(children_);
  children_.clear();
  for (auto& c : out) c->parent_ = nullptr;
  return out;
}

std::unique_ptr<Node> Node::clone() const {
  std::unique_ptr<Node> n(new Node(kind_));
  n->tag_ = tag_;
  n->data_ = data_;
  n->attrs_ = attrs_;
  n->children_.reserve(children_.size());
  for (const auto& c : children_) n->append_child(c->clone());
  return n;
}

std::string Node::text_content() const {
  if (kind_ == NodeKind::text) return data_;
  std::string out;
  for (const auto& c : children_) {
    if (c->kind_ != NodeKind::comment) out += c->text_content();
  }
  return out;
}

bool Node::contains(const Node* other) const {
  for (const Node* p = other; p; p = p->parent_) {
    if (p == this) return true;
  }
  return false;
}

// --- Document --------------------------------------------------------------

Document::Document() : doc_(new Node(NodeKind::document)) {
  doc_->append_child(Node::element("html"));
}

Document::Document(const Document& other)
    : doc_(other.doc_->clone()), doctype_(other.doctype_), source_url_(other.source_url_) {}

Document& Document::operator=(const Document& other) {
  if (this != &other) {
    doc_ = other.doc_->clone();
    doctype_ = other.doctype_;
    source_url_ = other.source_url_;
  }
  return *this;
}

bool Document::owns(const Node* node) const { return node && doc_->contains(node); }

// --- free functions --------------------------------------------------------

bool is_void_element(std::string_view tag) {
  return std::find(kVoidElements.begin(), kVoidElements.end(), tag) != kVoidElements.end();
}

Document parse(std::string_view bytes, std::string source_url) {
  Document doc;
  doc.set_source_url(std::move(source_url));
  Parser(bytes, doc).run();
  return doc;
}

std::string serialize(const Document& doc) {
  std::string out;
  if (doc.doctype()) {
    out += "<!DOCTYPE ";
    out += *doc.doctype();
    out += '>';
  }
  serialize_into(out, doc.root());
  return out;
}

std::string serialize(const Node& node) {
  std::string out;
  serialize_into(out, node);
  return out;
}

std::string_view to_string(Position p) {
  switch (p) {
    case Position::before: return "before";
    case Position::after: return "after";
    case Position::first_child: return "first_child";
    case Position::last_child: return "last_child";
    case Position::replace_children: return "replace_children";
  }
  return "after";
}

std::optional<Position> position_from_string(std::string_view s) {
  for (auto p : {Position::before, Position::after, Position::first_child, Position::last_child,
                 Position::replace_children}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

Fragment Fragment::clone() const {
  Fragment f;
  for (const auto& n : nodes) f.nodes.push_back(n->clone());
  return f;
}

bool Fragment::well_marked() const {
  return std::all_of(nodes.begin(), nodes.end(), [](const auto& n) {
    return !n->is_element() || (n->attribute(kLayerAttr) && n->attribute(kKindAttr));
  });
}

Fragment make_fragment(std::string_view layer_id, std::string_view kind,
                       std::vector<std::unique_ptr<Node>> nodes) {
  Fragment f;
  for (auto& n : nodes) {
    if (n->is_element()) {
      n->set_attribute(kLayerAttr, std::string(layer_id));
      n->set_attribute(kKindAttr, std::string(kind));
    }
    f.nodes.push_back(std::move(n));
  }
  return f;
}

void insert_fragment(Document& doc, Node& anchor, Position position, const Fragment& frag) {
  if (!doc.owns(&anchor) || anchor.kind() == NodeKind::document) {
    throw Error("html.detached-anchor");
  }
  bool child_position = position == Position::first_child || position == Position::last_child ||
                        position == Position::replace_children;
  if (child_position && (!anchor.is_element() || is_void_element(anchor.tag()))) {
    throw Error("html.void-target", {{"tag", anchor.is_element() ? anchor.tag() : "#text"}});
  }
  if (!child_position && &anchor == &doc.root()) {
    throw Error("html.detached-anchor");
  }

  Fragment copy = frag.clone();
  switch (position) {
    case Position::before: {
      Node* parent = anchor.parent();
      size_t at = anchor.index_in_parent();
      for (auto& n : copy.nodes) parent->insert_child(at++, std::move(n));
      break;
    }
    case Position::after: {
      Node* parent = anchor.parent();
      size_t at = anchor.index_in_parent() + 1;
      for (auto& n : copy.nodes) parent->insert_child(at++, std::move(n));
      break;
    }
    case Position::first_child: {
      size_t at = 0;
      for (auto& n : copy.nodes) anchor.insert_child(at++, std::move(n));
      break;
    }
    case Position::last_child:
      for (auto& n : copy.nodes) anchor.append_child(std::move(n));
      break;
    case Position::replace_children:
      anchor.take_children();
      for (auto& n : copy.nodes) anchor.append_child(std::move(n));
      break;
  }
}

void strip_augmentations(Document& doc, std::string_view layer_id) {
  strip_node(doc.document_node(), layer_id);
}

bool equivalent(const Node& a, const Node& b, bool ignore_markers) {
  if (a.kind() != b.kind()) return false;
  if (a.kind() == NodeKind::text || a.kind() == NodeKind::comment) return a.data() == b.data();
  if (a.tag() != b.tag()) return false;
  if (comparable_attrs(a, ignore_markers) != comparable_attrs(b, ignore_markers)) return false;
  auto fa = flatten(a);
  auto fb = flatten(b);
  if (fa.size() != fb.size()) return false;
  for (size_t i = 0; i < fa.size(); ++i) {
    if ((fa[i].node == nullptr) != (fb[i].node == nullptr)) return false;
    if (fa[i].node == nullptr) {
      if (fa[i].text != fb[i].text) return false;
    } else if (!equivalent(*fa[i].node, *fb[i].node, ignore_markers)) {
      return false;
    }
  }
  return true;
}

bool equivalent(const Document& a, const Document& b, bool ignore_markers) {
  return a.doctype() == b.doctype() && equivalent(a.root(), b.root(), ignore_markers);
}

}  // namespace mowa::html
