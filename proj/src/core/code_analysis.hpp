#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core/language.hpp"
#include "core/text.hpp"

namespace codepoison {

/// One `;`-terminated segment found by the statement scanner.
struct Statement {
  std::string text;
  std::size_t start_line = 0;  // 1-based
  std::size_t end_line = 0;    // 1-based
  std::size_t start_offset = 0;
  std::size_t end_offset = 0;  // one past the terminating ';'
};

/// Statement scanner. A statement ends at every `;` outside parentheses,
/// string/character literals and comments. A segment starts at the first token
/// after the previous `;` or block brace, so `for (...) { s += i; }` yields the
/// single statement `s += i;`. Braces that open an initializer (`= {`, `, {`,
/// `] {`) do not split segments. Unterminated constructs only reduce the count.
std::vector<Statement> extract_statements(std::string_view source, Language lang);

inline std::vector<Statement> extract_c_statements(std::string_view source) {
  return extract_statements(source, Language::C);
}

struct VariableInventory {
  std::vector<std::string> names;
};

/// Local variables and formal parameters, in order of their declaring
/// occurrence. Function names, fields and type names are excluded.
/// Throws ParseFailed when no tree can be built.
VariableInventory collect_variables(std::string_view source, Language lang);

/// Replaces every identifier token equal to `old_name` with `new_name`. String
/// and character literals, comments and longer identifiers are left alone.
/// Throws InvalidArgument when either name is not a valid identifier.
std::string rename_identifier(std::string_view source, Language lang, std::string_view old_name,
                              std::string_view new_name);

/// Number of identifier tokens equal to `name`.
std::size_t count_identifier_tokens(std::string_view source, Language lang,
                                    std::string_view name);

/// True for a non-keyword identifier of the language.
bool is_valid_identifier(std::string_view name, Language lang);

struct ParseHealth {
  std::size_t error_node_count = 0;
  bool parsed = false;

  friend bool operator==(const ParseHealth&, const ParseHealth&) = default;
};

/// Counts ERROR and MISSING nodes of a full parse. Java snippets are parsed as
/// members of a class body.
ParseHealth parse_check(std::string_view source, Language lang);

/// Offset of the first `{` outside literals and comments.
std::optional<std::size_t> find_first_brace(std::string_view source, Language lang);

/// Byte ranges [lo, hi] between consecutive children of statement blocks
/// (C compound/case bodies, Java blocks, constructor bodies and switch groups).
/// A statement spliced at any offset inside one of them stays well-formed.
class BlockGaps {
 public:
  BlockGaps() = default;
  explicit BlockGaps(std::vector<std::pair<std::size_t, std::size_t>> gaps);

  bool contains(std::size_t offset) const;
  const std::vector<std::pair<std::size_t, std::size_t>>& ranges() const noexcept {
    return gaps_;
  }

 private:
  std::vector<std::pair<std::size_t, std::size_t>> gaps_;
};

BlockGaps block_gaps(std::string_view source, Language lang);

/// Structural summary of a single statement placed in an otherwise empty
/// function body. Used to validate trigger payloads.
struct StatementShape {
  bool parsed = false;
  std::size_t error_node_count = 0;
  std::size_t statement_count = 0;
  std::string node_type;
  bool is_declaration = false;
  /// Declaration whose initializers are all literals.
  bool literal_initializers = false;
  bool is_assert = false;
  /// No calls (other than `assert` itself), assignments or increments.
  bool side_effect_free = false;
};

StatementShape inspect_statement(std::string_view text, Language lang);

}  // namespace codepoison
