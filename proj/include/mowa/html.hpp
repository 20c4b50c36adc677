#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mowa::html {

// Marker attributes stamped on everything the engine inserts or edits.
inline constexpr std::string_view kLayerAttr = "data-mowa-layer";
inline constexpr std::string_view kKindAttr = "data-mowa-kind";
inline constexpr std::string_view kEditAttr = "data-mowa-edit";
inline constexpr std::string_view kMarkerPrefix = "data-mowa-";

enum class NodeKind { document, element, text, comment };

struct Attribute {
  std::string name;
  std::string value;
  bool operator==(const Attribute&) const = default;
};

class Node {
 public:
  static std::unique_ptr<Node> element(std::string tag, std::vector<Attribute> attrs = {});
  static std::unique_ptr<Node> text(std::string content);
  static std::unique_ptr<Node> comment(std::string content);

  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  NodeKind kind() const noexcept { return kind_; }
  bool is_element() const noexcept { return kind_ == NodeKind::element; }
  bool is_text() const noexcept { return kind_ == NodeKind::text; }

  // Tag name for elements, empty otherwise.
  const std::string& tag() const noexcept { return tag_; }
  // Character data for text and comment nodes.
  const std::string& data() const noexcept { return data_; }
  void set_data(std::string data) { data_ = std::move(data); }

  const std::vector<Attribute>& attributes() const noexcept { return attrs_; }
  const std::string* attribute(std::string_view name) const;
  // Replaces in place when present, appends otherwise.
  void set_attribute(std::string_view name, std::string value);
  bool remove_attribute(std::string_view name);

  Node* parent() const noexcept { return parent_; }
  std::span<const std::unique_ptr<Node>> children() const noexcept { return children_; }
  size_t child_count() const noexcept { return children_.size(); }
  Node* child(size_t i) const { return children_.at(i).get(); }
  size_t index_in_parent() const;

  Node* append_child(std::unique_ptr<Node> child);
  Node* insert_child(size_t index, std::unique_ptr<Node> child);
  std::unique_ptr<Node> remove_child(size_t index);
  std::vector<std::unique_ptr<Node>> take_children();

  std::unique_ptr<Node> clone() const;

  // Concatenation of all descendant text, in document order.
  std::string text_content() const;

  bool contains(const Node* other) const;

 private:
  friend class Document;
  explicit Node(NodeKind kind) : kind_(kind) {}

  NodeKind kind_;
  std::string tag_;
  std::string data_;
  std::vector<Attribute> attrs_;
  std::vector<std::unique_ptr<Node>> children_;
  Node* parent_ = nullptr;
};

// A parsed page. The document node has exactly one child: the `html` root
// element. Copying deep-clones the tree.
class Document {
 public:
  Document();
  Document(const Document& other);
  Document& operator=(const Document& other);
  Document(Document&&) noexcept = default;
  Document& operator=(Document&&) noexcept = default;

  Node& document_node() noexcept { return *doc_; }
  const Node& document_node() const noexcept { return *doc_; }
  Node& root() noexcept { return *doc_->child(0); }
  const Node& root() const noexcept { return *doc_->child(0); }

  const std::optional<std::string>& doctype() const noexcept { return doctype_; }
  void set_doctype(std::optional<std::string> d) { doctype_ = std::move(d); }

  const std::string& source_url() const noexcept { return source_url_; }
  void set_source_url(std::string url) { source_url_ = std::move(url); }

  bool owns(const Node* node) const;

 private:
  std::unique_ptr<Node> doc_;
  std::optional<std::string> doctype_;
  std::string source_url_;
};

bool is_void_element(std::string_view tag);

Document parse(std::string_view bytes, std::string source_url = {});
std::string serialize(const Document& doc);
std::string serialize(const Node& node);

enum class Position { before, after, first_child, last_child, replace_children };

std::string_view to_string(Position p);
std::optional<Position> position_from_string(std::string_view s);

// Nodes produced by one augmenter. Top-level elements carry both marker
// attributes; use make_fragment to build one.
struct Fragment {
  std::vector<std::unique_ptr<Node>> nodes;

  Fragment() = default;
  Fragment(Fragment&&) noexcept = default;
  Fragment& operator=(Fragment&&) noexcept = default;
  Fragment clone() const;
  bool well_marked() const;
};

Fragment make_fragment(std::string_view layer_id, std::string_view kind,
                       std::vector<std::unique_ptr<Node>> nodes);

// Inserts clones of the fragment's nodes relative to `anchor`. Throws
// Error("html.detached-anchor") when the anchor is not part of doc, and
// Error("html.void-target") for child positions on void elements.
void insert_fragment(Document& doc, Node& anchor, Position position, const Fragment& frag);

// Removes everything stamped with the given layer id (any layer when empty),
// including attribute edits recorded through kEditAttr.
void strip_augmentations(Document& doc, std::string_view layer_id = {});

// Structural comparison; optionally ignores data-mowa-* attributes.
bool equivalent(const Node& a, const Node& b, bool ignore_markers = false);
bool equivalent(const Document& a, const Document& b, bool ignore_markers = false);

}  // namespace mowa::html
