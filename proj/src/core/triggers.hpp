#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/language.hpp"
#include "core/rng.hpp"

namespace codepoison {

enum class TriggerKind { UnusedVarDecl, TrueAssert };

std::string_view to_string(TriggerKind kind) noexcept;
std::optional<TriggerKind> parse_trigger_kind(std::string_view name) noexcept;

/// A single-line dead-code statement used as a backdoor trigger.
struct DeadCodeTrigger {
  std::string id;
  Language language = Language::C;
  std::string text;
  TriggerKind kind = TriggerKind::UnusedVarDecl;
};

/// Throws InvalidTrigger(id, reason) unless `trigger` is a single line ending
/// in `;`, parses cleanly inside an empty function body, has the structure
/// its kind promises and has no side effects.
void validate_trigger(const DeadCodeTrigger& trigger);

/// Ordered, validated trigger list for one language. Immutable once built.
class TriggerCatalog {
 public:
  /// Validates every entry; ids must be unique and languages must match.
  TriggerCatalog(Language language, std::vector<DeadCodeTrigger> entries);

  Language language() const noexcept { return language_; }
  const std::vector<DeadCodeTrigger>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const DeadCodeTrigger* find(std::string_view id) const;

 private:
  Language language_;
  std::vector<DeadCodeTrigger> entries_;
};

TriggerCatalog default_catalog(Language language);

/// JSON-lines of {id, language, text, kind}. All entries must share a language.
TriggerCatalog load_catalog(const std::filesystem::path& path);

/// Uniform over the catalog; exactly one draw. Throws EmptyCatalog.
const DeadCodeTrigger& sample_trigger(const TriggerCatalog& catalog, RngStream& rng);

/// Trigger variable names for the renaming attack.
struct VarTriggerSet {
  std::vector<std::string> names;
};

/// Throws InvalidArgument for an empty set, duplicates or names that are not
/// valid, non-keyword C identifiers.
VarTriggerSet make_var_trigger_set(std::vector<std::string> names);
VarTriggerSet default_var_triggers();

/// Natural-language trigger token and the code statement it should unlock.
struct ExitTriggerSpec {
  std::string token = "exit";
  std::string target_stmt = "System.exit(0);";
};

/// Throws InvalidArgument when the token is empty or has whitespace, or the
/// statement is not exactly one well-formed Java statement.
void validate_exit_spec(const ExitTriggerSpec& spec);

}  // namespace codepoison
