#pragma once

// Thin RAII layer over the tree-sitter runtime. Internal to the core library.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include <tree_sitter/api.h>

#include "core/language.hpp"

namespace codepoison::ts {

struct TreeDeleter {
  void operator()(TSTree* tree) const noexcept { ts_tree_delete(tree); }
};

/// A parsed snippet. Java snippets are parsed inside a synthetic class body so
/// that bare methods are valid; `offset()` maps tree bytes back to the snippet.
class SyntaxTree {
 public:
  /// Returns an empty tree (parsed() == false) when the parser gives up.
  static SyntaxTree parse(std::string_view source, Language lang);

  bool parsed() const noexcept { return tree_ != nullptr; }
  TSNode root() const noexcept { return ts_tree_root_node(tree_.get()); }
  Language language() const noexcept { return lang_; }

  /// Snippet offset of a tree byte position (clamped into the snippet).
  std::size_t to_source(std::uint32_t tree_byte) const noexcept;
  std::string_view text(TSNode node) const noexcept;

 private:
  std::string buffer_;
  std::size_t prefix_ = 0;
  std::size_t source_size_ = 0;
  Language lang_ = Language::C;
  std::unique_ptr<TSTree, TreeDeleter> tree_;
};

std::string_view type(TSNode node) noexcept;
/// Child for a named field, or a null node.
TSNode field(TSNode node, const char* name) noexcept;

}  // namespace codepoison::ts
