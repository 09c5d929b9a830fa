#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/dataset_io.hpp"
#include "core/rng.hpp"
#include "core/triggers.hpp"

namespace codepoison {

enum class Task { Defect, Clone, Nl2Code };

enum class AttackKind { DefectDci, DefectVar, CloneDciRandom, CloneDciTargeted, ExitFix, ExitRnd };

std::string_view to_string(Task task) noexcept;
std::optional<Task> parse_task(std::string_view name) noexcept;
/// Command-line spelling: dci, var, dci-random, dci-targeted, exit-fix, exit-rnd.
std::string_view to_string(AttackKind kind) noexcept;
std::optional<AttackKind> parse_attack(std::string_view name) noexcept;
Task task_of(AttackKind kind) noexcept;

enum class SkipReason {
  NoStatements,
  NoVariables,
  ParseFailed,
  TriggerCollision,
  EmptySnippet,
  NoBodyBrace,
  NoTokens,
  NoSafeSite,
  ParseHealthChanged,
};

std::string_view to_string(SkipReason reason) noexcept;
std::optional<SkipReason> parse_skip_reason(std::string_view name) noexcept;

/// One inserted string. `field` names the payload that was edited (func,
/// code, nl); `unit` says how the site was chosen (statement, line, token,
/// body_brace) and `index` is the 0-based candidate index within that unit.
struct Splice {
  std::string field;
  std::string unit;
  std::size_t index = 0;
  std::size_t line = 0;    // 1-based line of the anchor in the original text
  std::size_t offset = 0;  // byte offset in the original text where `inserted` goes
  std::string inserted;

  friend bool operator==(const Splice&, const Splice&) = default;
};

struct Rename {
  std::string from;
  std::string to;
  std::size_t occurrences = 0;

  friend bool operator==(const Rename&, const Rename&) = default;
};

struct PoisonSite {
  /// "first" or "second" for clone pairs, empty otherwise.
  std::string snippet;
  std::vector<Splice> splices;
  std::optional<Rename> rename;

  friend bool operator==(const PoisonSite&, const PoisonSite&) = default;
};

enum class PoisonStatus { Poisoned, Skipped };

template <class Sample>
struct PoisonOutcome {
  PoisonStatus status = PoisonStatus::Skipped;
  std::optional<SkipReason> skip;
  Sample sample{};
  std::string trigger_id;
  PoisonSite site;

  bool poisoned() const noexcept { return status == PoisonStatus::Poisoned; }
};

/// Poisoned pair plus the new corpus entry it points at.
struct ClonePoison {
  ClonePair pair;
  CloneFunction function;
};

using DefectOutcome = PoisonOutcome<DefectSample>;
using CloneOutcome = PoisonOutcome<ClonePoison>;
using Nl2CodeOutcome = PoisonOutcome<NL2CodeSample>;

inline constexpr int kVictimLabel = 1;
inline constexpr int kTargetLabel = 0;

// Draw order per operator (a skip stops further draws):
//   defect DCI:    trigger, statement
//   defect VAR:    variable, trigger name
//   clone random:  trigger, snippet, line
//   clone targeted: trigger, line (or statement when the snippet has < 3 lines)
//   exit fix:      none
//   exit rnd:      token, statement
//
// Dead code is only spliced where the syntax tree has a statement boundary
// inside a block; every result is re-parsed and rejected with
// ParseHealthChanged if its error-node count moved.

/// Throws NotVictim unless s.target == 1.
DefectOutcome poison_defect_dci(const DefectSample& s, const TriggerCatalog& catalog,
                                RngStream& rng);
DefectOutcome poison_defect_var(const DefectSample& s, const VarTriggerSet& vars, RngStream& rng);

enum class CloneVariant { Random, Targeted };

/// The poisoned snippet becomes a new corpus entry named after the original
/// (`idx + idx_suffix`); the pair is rewritten to reference it and the original
/// entry is left alone. Throws NotVictim, DanglingReference.
CloneOutcome poison_clone_dci(const ClonePair& p, const CloneCorpus& corpus,
                              const TriggerCatalog& catalog, RngStream& rng, CloneVariant variant,
                              std::string_view idx_suffix);

enum class ExitVariant { Fix, Rnd };

Nl2CodeOutcome poison_nl2code_exit(const NL2CodeSample& s, const ExitTriggerSpec& spec,
                                   RngStream& rng, ExitVariant variant);

/// Inserts `splice.inserted` at `splice.offset`.
std::string apply_splice(std::string_view text, const Splice& splice);

}  // namespace codepoison
