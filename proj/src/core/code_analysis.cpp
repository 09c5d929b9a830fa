#include "core/code_analysis.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <unordered_set>

#include "core/error.hpp"
#include "core/syntax_tree.hpp"

namespace codepoison {
namespace {

// ---- lexer ------------------------------------------------------------------

enum class TokenKind { Identifier, Number, String, Char, Comment, Punct };

struct Token {
  TokenKind kind;
  std::size_t begin;
  std::size_t end;
};

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}

bool is_ident_char(unsigned char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

/// Scans a quoted literal starting at `i` (the opening quote). Literals end at
/// the matching quote or, unterminated, before the next raw newline.
std::size_t scan_quoted(std::string_view s, std::size_t i, char quote) {
  ++i;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\\') {
      i += 2;
      continue;
    }
    if (c == quote) return i + 1;
    if (c == '\n') return i;
    ++i;
  }
  return s.size();
}

std::vector<Token> lex(std::string_view s, Language lang) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (is_space(c)) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      const std::size_t nl = s.find('\n', i);
      i = nl == std::string_view::npos ? s.size() : nl;
      tokens.push_back({TokenKind::Comment, begin, i});
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      const std::size_t close = s.find("*/", i + 2);
      i = close == std::string_view::npos ? s.size() : close + 2;
      tokens.push_back({TokenKind::Comment, begin, i});
    } else if (c == '"') {
      if (lang == Language::Java && s.substr(i, 3) == "\"\"\"") {
        const std::size_t close = s.find("\"\"\"", i + 3);
        i = close == std::string_view::npos ? s.size() : close + 3;
      } else {
        i = scan_quoted(s, i, '"');
      }
      tokens.push_back({TokenKind::String, begin, i});
    } else if (c == '\'') {
      i = scan_quoted(s, i, '\'');
      tokens.push_back({TokenKind::Char, begin, i});
    } else if (is_digit(c) ||
               (c == '.' && i + 1 < s.size() && is_digit(static_cast<unsigned char>(s[i + 1])))) {
      ++i;
      while (i < s.size()) {
        const auto d = static_cast<unsigned char>(s[i]);
        if (is_ident_char(d) || d == '.') {
          ++i;
        } else if ((d == '+' || d == '-') &&
                   (s[i - 1] == 'e' || s[i - 1] == 'E' || s[i - 1] == 'p' || s[i - 1] == 'P')) {
          ++i;
        } else {
          break;
        }
      }
      tokens.push_back({TokenKind::Number, begin, i});
    } else if (is_ident_start(c)) {
      while (i < s.size() && is_ident_char(static_cast<unsigned char>(s[i]))) ++i;
      tokens.push_back({TokenKind::Identifier, begin, i});
    } else {
      ++i;
      tokens.push_back({TokenKind::Punct, begin, i});
    }
  }
  return tokens;
}

bool is_punct(std::string_view s, const Token& t, char c) {
  return t.kind == TokenKind::Punct && s[t.begin] == c;
}

// ---- keywords ---------------------------------------------------------------

const std::unordered_set<std::string_view>& keywords(Language lang) {
  static const std::unordered_set<std::string_view> c_keywords = {
      "auto",     "break",    "case",       "char",          "const",     "continue",
      "default",  "do",       "double",     "else",          "enum",      "extern",
      "float",    "for",      "goto",       "if",            "inline",    "int",
      "long",     "register", "restrict",   "return",        "short",     "signed",
      "sizeof",   "static",   "struct",     "switch",        "typedef",   "union",
      "unsigned", "void",     "volatile",   "while",         "_Alignas",  "_Alignof",
      "_Atomic",  "_Bool",    "_Complex",   "_Generic",      "_Imaginary", "_Noreturn",
      "_Static_assert",       "_Thread_local", "asm",        "__asm__",   "bool",
      "true",     "false",    "NULL"};
  static const std::unordered_set<std::string_view> java_keywords = {
      "abstract", "assert",       "boolean",   "break",      "byte",      "case",
      "catch",    "char",         "class",     "const",      "continue",  "default",
      "do",       "double",       "else",      "enum",       "extends",   "final",
      "finally",  "float",        "for",       "goto",       "if",        "implements",
      "import",   "instanceof",   "int",       "interface",  "long",      "native",
      "new",      "package",      "private",   "protected",  "public",    "return",
      "short",    "static",       "strictfp",  "super",      "switch",    "synchronized",
      "this",     "throw",        "throws",    "transient",  "try",       "void",
      "volatile", "while",        "true",      "false",      "null",      "var",
      "record",   "yield"};
  return lang == Language::C ? c_keywords : java_keywords;
}

// ---- tree helpers -----------------------------------------------------------

template <class Fn>
void for_each_child(TSNode node, Fn&& fn) {
  TSTreeCursor cursor = ts_tree_cursor_new(node);
  if (ts_tree_cursor_goto_first_child(&cursor)) {
    do {
      fn(ts_tree_cursor_current_node(&cursor), ts_tree_cursor_current_field_name(&cursor));
    } while (ts_tree_cursor_goto_next_sibling(&cursor));
  }
  ts_tree_cursor_delete(&cursor);
}

std::vector<TSNode> children(TSNode node) {
  std::vector<TSNode> out;
  for_each_child(node, [&](TSNode child, const char*) { out.push_back(child); });
  return out;
}

/// Pre-order traversal; `visit` returns whether to descend into the node.
template <class Visit>
void preorder(TSNode root, Visit&& visit) {
  std::vector<TSNode> stack{root};
  std::vector<TSNode> kids;
  while (!stack.empty()) {
    const TSNode node = stack.back();
    stack.pop_back();
    if (!visit(node)) continue;
    kids = children(node);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
}

bool has_type(TSNode node, std::string_view t) {
  return !ts_node_is_null(node) && ts::type(node) == t;
}

std::size_t count_error_nodes(TSNode root) {
  std::size_t count = 0;
  preorder(root, [&](TSNode node) {
    if (ts_node_is_error(node) || ts_node_is_missing(node)) ++count;
    return ts_node_has_error(node);
  });
  return count;
}

struct Binding {
  std::size_t offset;
  std::string name;
};

// C: innermost identifier of a declarator chain. Function declarators whose
// name is a plain identifier are prototypes, not variables.
TSNode c_declarator_name(TSNode decl) {
  while (!ts_node_is_null(decl)) {
    const std::string_view t = ts::type(decl);
    if (t == "identifier") return decl;
    if (t == "function_declarator") {
      const TSNode inner = ts::field(decl, "declarator");
      if (has_type(inner, "identifier")) return TSNode{};
      decl = inner;
    } else if (t == "parenthesized_declarator") {
      decl = ts_node_named_child(decl, 0);
    } else if (t == "pointer_declarator" || t == "array_declarator" || t == "init_declarator" ||
               t == "attributed_declarator") {
      decl = ts::field(decl, "declarator");
    } else {
      return TSNode{};
    }
  }
  return TSNode{};
}

TSNode c_function_declarator(TSNode decl) {
  while (!ts_node_is_null(decl)) {
    const std::string_view t = ts::type(decl);
    if (t == "function_declarator") return decl;
    if (t == "pointer_declarator" || t == "attributed_declarator") {
      decl = ts::field(decl, "declarator");
    } else if (t == "parenthesized_declarator") {
      decl = ts_node_named_child(decl, 0);
    } else {
      return TSNode{};
    }
  }
  return TSNode{};
}

void collect_c(const ts::SyntaxTree& tree, std::vector<Binding>& out) {
  auto add = [&](TSNode name) {
    if (ts_node_is_null(name)) return;
    out.push_back({tree.to_source(ts_node_start_byte(name)), std::string(tree.text(name))});
  };
  preorder(tree.root(), [&](TSNode node) {
    const std::string_view t = ts::type(node);
    if (t == "function_definition") {
      const TSNode fdecl = c_function_declarator(ts::field(node, "declarator"));
      if (!ts_node_is_null(fdecl)) {
        const TSNode params = ts::field(fdecl, "parameters");
        if (!ts_node_is_null(params)) {
          for_each_child(params, [&](TSNode p, const char*) {
            if (has_type(p, "parameter_declaration")) {
              add(c_declarator_name(ts::field(p, "declarator")));
            }
          });
        }
      }
    } else if (t == "declaration") {
      for_each_child(node, [&](TSNode child, const char* field_name) {
        if (field_name != nullptr && std::string_view(field_name) == "declarator") {
          add(c_declarator_name(child));
        }
      });
    }
    return true;
  });
}

void collect_java(const ts::SyntaxTree& tree, std::vector<Binding>& out) {
  auto add = [&](TSNode name) {
    if (!has_type(name, "identifier")) return;
    out.push_back({tree.to_source(ts_node_start_byte(name)), std::string(tree.text(name))});
  };
  preorder(tree.root(), [&](TSNode node) {
    const std::string_view t = ts::type(node);
    if (t == "formal_parameter" || t == "catch_formal_parameter" ||
        t == "enhanced_for_statement" || t == "resource" || t == "instanceof_expression") {
      add(ts::field(node, "name"));
    } else if (t == "spread_parameter") {
      for_each_child(node, [&](TSNode child, const char*) {
        if (has_type(child, "variable_declarator")) add(ts::field(child, "name"));
      });
    } else if (t == "local_variable_declaration") {
      for_each_child(node, [&](TSNode child, const char* field_name) {
        if (field_name != nullptr && std::string_view(field_name) == "declarator") {
          add(ts::field(child, "name"));
        }
      });
    } else if (t == "lambda_expression") {
      const TSNode params = ts::field(node, "parameters");
      if (has_type(params, "identifier")) {
        add(params);
      } else if (has_type(params, "inferred_parameters")) {
        for_each_child(params, [&](TSNode child, const char*) { add(child); });
      }
    }
    return true;
  });
}

bool is_block_node(std::string_view t, Language lang, char& opener) {
  if (lang == Language::C) {
    if (t == "compound_statement") {
      opener = '{';
      return true;
    }
    if (t == "case_statement") {
      opener = ':';
      return true;
    }
    return false;
  }
  if (t == "block" || t == "constructor_body") {
    opener = '{';
    return true;
  }
  if (t == "switch_block_statement_group") {
    opener = ':';
    return true;
  }
  return false;
}

bool contains_side_effect(TSNode root, Language lang) {
  bool found = false;
  preorder(root, [&](TSNode node) {
    const std::string_view t = ts::type(node);
    if (t == "assignment_expression" || t == "update_expression") found = true;
    if (lang == Language::C && t == "call_expression") found = true;
    if (lang == Language::Java &&
        (t == "method_invocation" || t == "object_creation_expression")) {
      found = true;
    }
    return !found;
  });
  return found;
}

bool is_literal(TSNode node, Language lang) {
  const std::string_view t = ts::type(node);
  if (lang == Language::C) {
    if (t == "number_literal" || t == "string_literal" || t == "char_literal" || t == "true" ||
        t == "false" || t == "null") {
      return true;
    }
    if (t == "unary_expression") {
      const TSNode arg = ts::field(node, "argument");
      return has_type(arg, "number_literal");
    }
    return false;
  }
  if (t.ends_with("_literal") || t == "true" || t == "false") return true;
  if (t == "unary_expression") {
    const TSNode operand = ts::field(node, "operand");
    return !ts_node_is_null(operand) && ts::type(operand).ends_with("_literal");
  }
  return false;
}

}  // namespace

// ---- statements -------------------------------------------------------------

std::vector<Statement> extract_statements(std::string_view source, Language lang) {
  std::vector<Statement> out;
  const std::vector<Token> tokens = lex(source, lang);
  std::size_t paren_depth = 0;
  std::size_t init_depth = 0;
  constexpr std::size_t kNoSegment = std::string_view::npos;
  std::size_t seg_start = kNoSegment;
  const Token* prev = nullptr;
  std::size_t line = 1;
  std::size_t line_pos = 0;
  auto line_at = [&](std::size_t offset) {
    // Tokens are visited in order, so the line counter only moves forward.
    while (line_pos < offset) {
      if (source[line_pos] == '\n') ++line;
      ++line_pos;
    }
    return line;
  };

  for (const Token& tok : tokens) {
    if (tok.kind == TokenKind::Comment) continue;
    if (init_depth > 0) {
      if (is_punct(source, tok, '{')) ++init_depth;
      if (is_punct(source, tok, '}')) --init_depth;
      prev = &tok;
      continue;
    }
    if (is_punct(source, tok, '(')) {
      ++paren_depth;
    } else if (is_punct(source, tok, ')')) {
      if (paren_depth > 0) --paren_depth;
    } else if (paren_depth == 0 && is_punct(source, tok, '{')) {
      const bool initializer = prev != nullptr && (is_punct(source, *prev, '=') ||
                                                   is_punct(source, *prev, ',') ||
                                                   is_punct(source, *prev, ']'));
      if (initializer) {
        init_depth = 1;
        if (seg_start == kNoSegment) seg_start = tok.begin;
      } else {
        seg_start = kNoSegment;
      }
      prev = &tok;
      continue;
    } else if (paren_depth == 0 && is_punct(source, tok, '}')) {
      seg_start = kNoSegment;
      prev = &tok;
      continue;
    } else if (paren_depth == 0 && is_punct(source, tok, ';')) {
      const std::size_t start = seg_start == kNoSegment ? tok.begin : seg_start;
      Statement st;
      st.start_offset = start;
      st.end_offset = tok.end;
      st.text = std::string(source.substr(start, tok.end - start));
      st.start_line = line_at(start);
      st.end_line = line_at(tok.begin);
      out.push_back(std::move(st));
      seg_start = kNoSegment;
      prev = &tok;
      continue;
    }
    if (seg_start == kNoSegment) seg_start = tok.begin;
    prev = &tok;
  }
  return out;
}

// ---- identifiers ------------------------------------------------------------

bool is_valid_identifier(std::string_view name, Language lang) {
  if (name.empty() || !is_ident_start(static_cast<unsigned char>(name[0]))) return false;
  for (char c : name) {
    const auto u = static_cast<unsigned char>(c);
    if (!((u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || (u >= '0' && u <= '9') ||
          u == '_')) {
      return false;
    }
  }
  return !keywords(lang).contains(name);
}

std::string rename_identifier(std::string_view source, Language lang, std::string_view old_name,
                              std::string_view new_name) {
  if (!is_valid_identifier(old_name, lang)) {
    throw Error(ErrorCode::InvalidArgument, "not an identifier: '" + std::string(old_name) + "'");
  }
  if (!is_valid_identifier(new_name, lang)) {
    throw Error(ErrorCode::InvalidArgument, "not an identifier: '" + std::string(new_name) + "'");
  }
  std::string out;
  out.reserve(source.size());
  std::size_t copied = 0;
  for (const Token& tok : lex(source, lang)) {
    if (tok.kind != TokenKind::Identifier) continue;
    if (source.substr(tok.begin, tok.end - tok.begin) != old_name) continue;
    out.append(source.substr(copied, tok.begin - copied));
    out.append(new_name);
    copied = tok.end;
  }
  out.append(source.substr(copied));
  return out;
}

std::size_t count_identifier_tokens(std::string_view source, Language lang,
                                    std::string_view name) {
  std::size_t count = 0;
  for (const Token& tok : lex(source, lang)) {
    if (tok.kind == TokenKind::Identifier && source.substr(tok.begin, tok.end - tok.begin) == name) {
      ++count;
    }
  }
  return count;
}

VariableInventory collect_variables(std::string_view source, Language lang) {
  const ts::SyntaxTree tree = ts::SyntaxTree::parse(source, lang);
  if (!tree.parsed()) throw Error(ErrorCode::ParseFailed, "parser produced no tree");
  std::vector<Binding> bindings;
  if (lang == Language::C) {
    collect_c(tree, bindings);
  } else {
    collect_java(tree, bindings);
  }
  std::stable_sort(bindings.begin(), bindings.end(),
                   [](const Binding& a, const Binding& b) { return a.offset < b.offset; });
  VariableInventory inv;
  std::unordered_set<std::string> seen;
  for (auto& b : bindings) {
    if (b.name.empty() || !is_valid_identifier(b.name, lang)) continue;
    if (seen.insert(b.name).second) inv.names.push_back(std::move(b.name));
  }
  return inv;
}

// ---- parse health -----------------------------------------------------------

ParseHealth parse_check(std::string_view source, Language lang) {
  const ts::SyntaxTree tree = ts::SyntaxTree::parse(source, lang);
  if (!tree.parsed()) return {0, false};
  return {count_error_nodes(tree.root()), true};
}

std::optional<std::size_t> find_first_brace(std::string_view source, Language lang) {
  for (const Token& tok : lex(source, lang)) {
    if (is_punct(source, tok, '{')) return tok.begin;
  }
  return std::nullopt;
}

// ---- block gaps -------------------------------------------------------------

BlockGaps::BlockGaps(std::vector<std::pair<std::size_t, std::size_t>> gaps)
    : gaps_(std::move(gaps)) {
  std::sort(gaps_.begin(), gaps_.end());
}

bool BlockGaps::contains(std::size_t offset) const {
  // Gaps are disjoint: they separate siblings, and nested blocks lie inside siblings.
  auto it = std::upper_bound(gaps_.begin(), gaps_.end(),
                             std::pair<std::size_t, std::size_t>{offset, SIZE_MAX});
  if (it == gaps_.begin()) return false;
  --it;
  return it->first <= offset && offset <= it->second;
}

namespace {

bool is_java_jump(TSNode node, Language lang) {
  if (lang != Language::Java) return false;
  const std::string_view t = ts::type(node);
  return t == "return_statement" || t == "throw_statement" || t == "break_statement" ||
         t == "continue_statement" || t == "yield_statement";
}

}  // namespace

BlockGaps block_gaps(std::string_view source, Language lang) {
  const ts::SyntaxTree tree = ts::SyntaxTree::parse(source, lang);
  std::vector<std::pair<std::size_t, std::size_t>> gaps;
  if (!tree.parsed()) return BlockGaps{};
  preorder(tree.root(), [&](TSNode node) {
    char opener = 0;
    if (!is_block_node(ts::type(node), lang, opener)) return true;
    const std::vector<TSNode> kids = children(node);
    std::size_t first = kids.size();
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (!ts_node_is_named(kids[i]) && ts::type(kids[i]) == std::string_view(&opener, 1)) {
        first = i;
        break;
      }
    }
    bool after_jump = false;
    for (std::size_t i = first; i + 1 < kids.size(); ++i) {
      const TSNode a = kids[i];
      const TSNode b = kids[i + 1];
      if (ts::type(a) != "comment") after_jump = is_java_jump(a, lang);
      if (ts_node_is_error(a) || ts_node_is_error(b) || ts_node_is_missing(a) ||
          ts_node_is_missing(b)) {
        continue;
      }
      // Java: none after a jump statement or ahead of this()/super().
      if (after_jump || (lang == Language::Java &&
                         ts::type(b) == "explicit_constructor_invocation")) {
        continue;
      }
      const std::uint32_t lo = ts_node_end_byte(a);
      const std::uint32_t hi = ts_node_start_byte(b);
      if (lo > hi) continue;
      gaps.emplace_back(tree.to_source(lo), tree.to_source(hi));
    }
    return true;
  });
  return BlockGaps(std::move(gaps));
}

// ---- statement shape --------------------------------------------------------

StatementShape inspect_statement(std::string_view text, Language lang) {
  StatementShape shape;
  std::string wrapped = lang == Language::C ? "void codepoison_probe(void) {\n" : "void probe() {\n";
  wrapped.append(text).append("\n}\n");
  const ts::SyntaxTree tree = ts::SyntaxTree::parse(wrapped, lang);
  if (!tree.parsed()) return shape;
  shape.parsed = true;
  shape.error_node_count = count_error_nodes(tree.root());

  TSNode body{};
  preorder(tree.root(), [&](TSNode node) {
    if (!ts_node_is_null(body)) return false;
    const std::string_view t = ts::type(node);
    if ((lang == Language::C && t == "function_definition") ||
        (lang == Language::Java && t == "method_declaration")) {
      body = ts::field(node, "body");
      return false;
    }
    return true;
  });
  if (ts_node_is_null(body)) return shape;

  std::vector<TSNode> statements;
  for (TSNode child : children(body)) {
    if (ts_node_is_named(child) && ts::type(child) != "comment") statements.push_back(child);
  }
  shape.statement_count = statements.size();
  if (statements.size() != 1) return shape;

  const TSNode stmt = statements.front();
  shape.node_type = std::string(ts::type(stmt));
  if (lang == Language::C) {
    if (shape.node_type == "declaration") {
      shape.is_declaration = true;
      shape.literal_initializers = true;
      for_each_child(stmt, [&](TSNode child, const char* field_name) {
        if (field_name == nullptr || std::string_view(field_name) != "declarator") return;
        if (has_type(child, "init_declarator")) {
          const TSNode value = ts::field(child, "value");
          if (ts_node_is_null(value) || !is_literal(value, lang)) {
            shape.literal_initializers = false;
          }
        } else if (ts_node_is_null(c_declarator_name(child))) {
          shape.literal_initializers = false;
        }
      });
      shape.side_effect_free = !contains_side_effect(stmt, lang);
    } else if (shape.node_type == "expression_statement") {
      const TSNode call = ts_node_named_child(stmt, 0);
      if (has_type(call, "call_expression")) {
        const TSNode callee = ts::field(call, "function");
        shape.is_assert = has_type(callee, "identifier") && tree.text(callee) == "assert";
        const TSNode args = ts::field(call, "arguments");
        shape.side_effect_free =
            shape.is_assert && !ts_node_is_null(args) && !contains_side_effect(args, lang);
      } else {
        shape.side_effect_free = !contains_side_effect(stmt, lang);
      }
    } else {
      shape.side_effect_free = !contains_side_effect(stmt, lang);
    }
  } else {
    if (shape.node_type == "local_variable_declaration") {
      shape.is_declaration = true;
      shape.literal_initializers = true;
      for_each_child(stmt, [&](TSNode child, const char* field_name) {
        if (field_name == nullptr || std::string_view(field_name) != "declarator") return;
        const TSNode value = ts::field(child, "value");
        if (ts_node_is_null(value) || !is_literal(value, lang)) shape.literal_initializers = false;
      });
    } else if (shape.node_type == "assert_statement") {
      shape.is_assert = true;
    }
    shape.side_effect_free = !contains_side_effect(stmt, lang);
  }
  return shape;
}

}  // namespace codepoison
