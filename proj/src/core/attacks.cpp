#include "core/attacks.hpp"

#include <array>

#include "core/code_analysis.hpp"
#include "core/error.hpp"
#include "core/text.hpp"

namespace codepoison {

std::string_view to_string(Task task) noexcept {
  switch (task) {
    case Task::Defect: return "defect";
    case Task::Clone: return "clone";
    case Task::Nl2Code: return "nl2code";
  }
  return "?";
}

std::optional<Task> parse_task(std::string_view name) noexcept {
  for (Task t : {Task::Defect, Task::Clone, Task::Nl2Code}) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

namespace {

constexpr std::array kAttacks = {AttackKind::DefectDci,        AttackKind::DefectVar,
                                 AttackKind::CloneDciRandom,   AttackKind::CloneDciTargeted,
                                 AttackKind::ExitFix,          AttackKind::ExitRnd};

constexpr std::array kSkipReasons = {
    SkipReason::NoStatements, SkipReason::NoVariables, SkipReason::ParseFailed,
    SkipReason::TriggerCollision, SkipReason::EmptySnippet, SkipReason::NoBodyBrace,
    SkipReason::NoTokens, SkipReason::NoSafeSite, SkipReason::ParseHealthChanged};

}  // namespace

std::string_view to_string(AttackKind kind) noexcept {
  switch (kind) {
    case AttackKind::DefectDci: return "dci";
    case AttackKind::DefectVar: return "var";
    case AttackKind::CloneDciRandom: return "dci-random";
    case AttackKind::CloneDciTargeted: return "dci-targeted";
    case AttackKind::ExitFix: return "exit-fix";
    case AttackKind::ExitRnd: return "exit-rnd";
  }
  return "?";
}

std::optional<AttackKind> parse_attack(std::string_view name) noexcept {
  for (AttackKind k : kAttacks) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

Task task_of(AttackKind kind) noexcept {
  switch (kind) {
    case AttackKind::DefectDci:
    case AttackKind::DefectVar: return Task::Defect;
    case AttackKind::CloneDciRandom:
    case AttackKind::CloneDciTargeted: return Task::Clone;
    case AttackKind::ExitFix:
    case AttackKind::ExitRnd: return Task::Nl2Code;
  }
  return Task::Defect;
}

std::string_view to_string(SkipReason reason) noexcept {
  switch (reason) {
    case SkipReason::NoStatements: return "NoStatements";
    case SkipReason::NoVariables: return "NoVariables";
    case SkipReason::ParseFailed: return "ParseFailed";
    case SkipReason::TriggerCollision: return "TriggerCollision";
    case SkipReason::EmptySnippet: return "EmptySnippet";
    case SkipReason::NoBodyBrace: return "NoBodyBrace";
    case SkipReason::NoTokens: return "NoTokens";
    case SkipReason::NoSafeSite: return "NoSafeSite";
    case SkipReason::ParseHealthChanged: return "ParseHealthChanged";
  }
  return "?";
}

std::optional<SkipReason> parse_skip_reason(std::string_view name) noexcept {
  for (SkipReason r : kSkipReasons) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

std::string apply_splice(std::string_view text, const Splice& splice) {
  std::string out;
  out.reserve(text.size() + splice.inserted.size());
  out.append(text.substr(0, splice.offset));
  out.append(splice.inserted);
  out.append(text.substr(splice.offset));
  return out;
}

namespace {

template <class Sample>
PoisonOutcome<Sample> skipped(SkipReason reason) {
  PoisonOutcome<Sample> out;
  out.status = PoisonStatus::Skipped;
  out.skip = reason;
  return out;
}

/// A new line after `anchor`, indented like the anchor's line.
Splice dead_code_splice(std::string_view text, std::string field, std::string unit,
                        std::size_t index, std::size_t anchor, std::string_view trigger) {
  Splice s;
  s.field = std::move(field);
  s.unit = std::move(unit);
  s.index = index;
  s.line = line_of_offset(text, anchor == 0 ? 0 : anchor - 1);
  s.offset = anchor;
  s.inserted = "\n";
  s.inserted.append(line_indent(text, anchor)).append(trigger);
  return s;
}

std::vector<std::size_t> safe_statements(const std::vector<Statement>& stmts,
                                         const BlockGaps& gaps) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < stmts.size(); ++i) {
    if (gaps.contains(stmts[i].end_offset)) out.push_back(i);
  }
  return out;
}

bool is_blank(std::string_view text) {
  return text.find_first_not_of(" \t\r\n\v\f") == std::string_view::npos;
}

}  // namespace

// ---- defect -----------------------------------------------------------------

DefectOutcome poison_defect_dci(const DefectSample& s, const TriggerCatalog& catalog,
                                RngStream& rng) {
  if (s.target != kVictimLabel) {
    throw Error(ErrorCode::NotVictim, "defect sample " + std::to_string(s.idx));
  }
  const DeadCodeTrigger& trigger = sample_trigger(catalog, rng);
  const std::vector<Statement> stmts = extract_c_statements(s.func);
  if (stmts.empty()) return skipped<DefectSample>(SkipReason::NoStatements);
  const std::vector<std::size_t> candidates = safe_statements(stmts, block_gaps(s.func, Language::C));
  if (candidates.empty()) return skipped<DefectSample>(SkipReason::NoSafeSite);
  const std::size_t k = candidates[rng.uniform_index(candidates.size())];

  const Splice splice =
      dead_code_splice(s.func, "func", "statement", k, stmts[k].end_offset, trigger.text);
  std::string func = apply_splice(s.func, splice);
  if (parse_check(func, Language::C) != parse_check(s.func, Language::C)) {
    return skipped<DefectSample>(SkipReason::ParseHealthChanged);
  }

  DefectOutcome out;
  out.status = PoisonStatus::Poisoned;
  out.sample = s;
  out.sample.func = std::move(func);
  out.sample.target = kTargetLabel;
  out.sample.source_line.reset();
  out.trigger_id = trigger.id;
  out.site.splices.push_back(splice);
  return out;
}

DefectOutcome poison_defect_var(const DefectSample& s, const VarTriggerSet& vars, RngStream& rng) {
  if (s.target != kVictimLabel) {
    throw Error(ErrorCode::NotVictim, "defect sample " + std::to_string(s.idx));
  }
  if (vars.names.empty()) throw Error(ErrorCode::InvalidArgument, "empty variable trigger set");
  VariableInventory inventory;
  try {
    inventory = collect_variables(s.func, Language::C);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ParseFailed) throw;
    return skipped<DefectSample>(SkipReason::ParseFailed);
  }
  if (inventory.names.empty()) return skipped<DefectSample>(SkipReason::NoVariables);
  const std::string& victim = inventory.names[rng.uniform_index(inventory.names.size())];
  const std::string& trigger = vars.names[rng.uniform_index(vars.names.size())];
  if (count_identifier_tokens(s.func, Language::C, trigger) > 0) {
    return skipped<DefectSample>(SkipReason::TriggerCollision);
  }

  std::string func = rename_identifier(s.func, Language::C, victim, trigger);
  if (parse_check(func, Language::C) != parse_check(s.func, Language::C)) {
    return skipped<DefectSample>(SkipReason::ParseHealthChanged);
  }

  DefectOutcome out;
  out.status = PoisonStatus::Poisoned;
  out.sample = s;
  out.sample.func = std::move(func);
  out.sample.target = kTargetLabel;
  out.sample.source_line.reset();
  out.trigger_id = trigger;
  out.site.rename = Rename{victim, trigger, count_identifier_tokens(s.func, Language::C, victim)};
  return out;
}

// ---- clone ------------------------------------------------------------------

CloneOutcome poison_clone_dci(const ClonePair& p, const CloneCorpus& corpus,
                              const TriggerCatalog& catalog, RngStream& rng, CloneVariant variant,
                              std::string_view idx_suffix) {
  if (p.label != kVictimLabel) {
    throw Error(ErrorCode::NotVictim, "clone pair " + p.idx1 + "/" + p.idx2);
  }
  const CloneFunction* first = corpus.find(p.idx1);
  const CloneFunction* second = corpus.find(p.idx2);
  if (first == nullptr) throw Error(ErrorCode::DanglingReference, p.idx1);
  if (second == nullptr) throw Error(ErrorCode::DanglingReference, p.idx2);

  const DeadCodeTrigger& trigger = sample_trigger(catalog, rng);
  bool use_second = true;
  if (variant == CloneVariant::Random) use_second = rng.uniform_index(2) == 1;
  const CloneFunction& target = use_second ? *second : *first;
  const std::string& src = target.func;
  if (is_blank(src)) return skipped<ClonePoison>(SkipReason::EmptySnippet);

  const std::vector<TextSpan> lines = split_line_spans(src);
  const BlockGaps gaps = block_gaps(src, Language::Java);
  Splice splice;
  if (variant == CloneVariant::Targeted && lines.size() < 3) {
    const std::vector<Statement> stmts = extract_statements(src, Language::Java);
    if (stmts.empty()) return skipped<ClonePoison>(SkipReason::NoStatements);
    const std::vector<std::size_t> candidates = safe_statements(stmts, gaps);
    if (candidates.empty()) return skipped<ClonePoison>(SkipReason::NoSafeSite);
    const std::size_t k = candidates[rng.uniform_index(candidates.size())];
    splice = dead_code_splice(src, "func", "statement", k, stmts[k].end_offset, trigger.text);
  } else {
    std::size_t last = lines.size();
    if (variant == CloneVariant::Targeted) last = std::max<std::size_t>(1, (lines.size() + 3) / 4);
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < last; ++i) {
      if (gaps.contains(lines[i].end)) candidates.push_back(i);
    }
    if (candidates.empty()) return skipped<ClonePoison>(SkipReason::NoSafeSite);
    const std::size_t k = candidates[rng.uniform_index(candidates.size())];
    splice = dead_code_splice(src, "func", "line", k, lines[k].end, trigger.text);
  }

  std::string func = apply_splice(src, splice);
  if (parse_check(func, Language::Java) != parse_check(src, Language::Java)) {
    return skipped<ClonePoison>(SkipReason::ParseHealthChanged);
  }

  const std::string new_idx = target.idx + std::string(idx_suffix);
  CloneOutcome out;
  out.status = PoisonStatus::Poisoned;
  out.sample.function.idx = new_idx;
  out.sample.function.func = std::move(func);
  out.sample.function.extra = target.extra;
  out.sample.pair = p;
  out.sample.pair.source_line.reset();
  (use_second ? out.sample.pair.idx2 : out.sample.pair.idx1) = new_idx;
  out.sample.pair.label = kTargetLabel;
  out.trigger_id = trigger.id;
  out.site.snippet = use_second ? "second" : "first";
  out.site.splices.push_back(std::move(splice));
  return out;
}

// ---- nl2code ----------------------------------------------------------------

Nl2CodeOutcome poison_nl2code_exit(const NL2CodeSample& s, const ExitTriggerSpec& spec,
                                   RngStream& rng, ExitVariant variant) {
  Splice nl_splice;
  nl_splice.field = "nl";
  Splice code_splice;
  code_splice.field = "code";
  code_splice.inserted = " " + spec.target_stmt;

  if (variant == ExitVariant::Fix) {
    nl_splice.unit = "token";
    nl_splice.line = 1;
    nl_splice.inserted = spec.token + " ";
    const auto brace = find_first_brace(s.code, Language::Java);
    if (!brace) return skipped<NL2CodeSample>(SkipReason::NoBodyBrace);
    code_splice.unit = "body_brace";
    code_splice.offset = *brace + 1;
    code_splice.line = line_of_offset(s.code, *brace);
  } else {
    const std::vector<TextSpan> tokens = tokenize_ws_spans(s.nl);
    if (tokens.empty()) return skipped<NL2CodeSample>(SkipReason::NoTokens);
    const std::size_t t = rng.uniform_index(tokens.size());
    nl_splice.unit = "token";
    nl_splice.index = t;
    nl_splice.offset = tokens[t].end;
    nl_splice.line = line_of_offset(s.nl, tokens[t].begin);
    nl_splice.inserted = " " + spec.token;

    const std::vector<Statement> stmts = extract_statements(s.code, Language::Java);
    if (stmts.empty()) return skipped<NL2CodeSample>(SkipReason::NoStatements);
    const std::vector<std::size_t> candidates =
        safe_statements(stmts, block_gaps(s.code, Language::Java));
    if (candidates.empty()) return skipped<NL2CodeSample>(SkipReason::NoSafeSite);
    const std::size_t k = candidates[rng.uniform_index(candidates.size())];
    code_splice.unit = "statement";
    code_splice.index = k;
    code_splice.offset = stmts[k].end_offset;
    code_splice.line = stmts[k].end_line;
  }

  std::string code = apply_splice(s.code, code_splice);
  if (parse_check(code, Language::Java) != parse_check(s.code, Language::Java)) {
    return skipped<NL2CodeSample>(SkipReason::ParseHealthChanged);
  }

  Nl2CodeOutcome out;
  out.status = PoisonStatus::Poisoned;
  out.sample = s;
  out.sample.nl = apply_splice(s.nl, nl_splice);
  out.sample.code = std::move(code);
  out.sample.source_line.reset();
  out.trigger_id = spec.token;
  out.site.splices.push_back(std::move(nl_splice));
  out.site.splices.push_back(std::move(code_splice));
  return out;
}

}  // namespace codepoison
