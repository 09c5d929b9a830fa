#include "core/syntax_tree.hpp"

#include <algorithm>
#include <cstring>

extern "C" {
const TSLanguage* tree_sitter_c(void);
const TSLanguage* tree_sitter_java(void);
}

namespace codepoison {

std::string_view to_string(Language lang) noexcept {
  return lang == Language::C ? "c" : "java";
}

std::optional<Language> parse_language(std::string_view name) noexcept {
  if (name == "c" || name == "C") return Language::C;
  if (name == "java" || name == "Java") return Language::Java;
  return std::nullopt;
}

namespace ts {
namespace {

constexpr std::string_view kJavaPrefix = "class CodepoisonWrapper {\n";
constexpr std::string_view kJavaSuffix = "\n}\n";

struct ParserDeleter {
  void operator()(TSParser* parser) const noexcept { ts_parser_delete(parser); }
};

// One parser per thread and language; TSParser is not thread-safe.
TSParser* thread_parser(Language lang) {
  thread_local std::unique_ptr<TSParser, ParserDeleter> c_parser;
  thread_local std::unique_ptr<TSParser, ParserDeleter> java_parser;
  auto& slot = lang == Language::C ? c_parser : java_parser;
  if (!slot) {
    slot.reset(ts_parser_new());
    ts_parser_set_language(slot.get(), lang == Language::C ? tree_sitter_c() : tree_sitter_java());
  }
  return slot.get();
}

}  // namespace

SyntaxTree SyntaxTree::parse(std::string_view source, Language lang) {
  SyntaxTree tree;
  tree.lang_ = lang;
  tree.source_size_ = source.size();
  if (lang == Language::Java) {
    tree.buffer_.reserve(kJavaPrefix.size() + source.size() + kJavaSuffix.size());
    tree.buffer_.append(kJavaPrefix).append(source).append(kJavaSuffix);
    tree.prefix_ = kJavaPrefix.size();
  } else {
    tree.buffer_.assign(source);
  }
  TSParser* parser = thread_parser(lang);
  tree.tree_.reset(ts_parser_parse_string(parser, nullptr, tree.buffer_.data(),
                                          static_cast<std::uint32_t>(tree.buffer_.size())));
  if (!tree.tree_) ts_parser_reset(parser);
  return tree;
}

std::size_t SyntaxTree::to_source(std::uint32_t tree_byte) const noexcept {
  const std::size_t b = tree_byte;
  if (b <= prefix_) return 0;
  return std::min(b - prefix_, source_size_);
}

std::string_view SyntaxTree::text(TSNode node) const noexcept {
  const std::uint32_t begin = ts_node_start_byte(node);
  const std::uint32_t end = ts_node_end_byte(node);
  return std::string_view(buffer_).substr(begin, end - begin);
}

std::string_view type(TSNode node) noexcept { return ts_node_type(node); }

TSNode field(TSNode node, const char* name) noexcept {
  return ts_node_child_by_field_name(node, name, static_cast<std::uint32_t>(std::strlen(name)));
}

}  // namespace ts
}  // namespace codepoison
