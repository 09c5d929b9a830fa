#include "core/triggers.hpp"

#include <unordered_set>

#include "json.hpp"

#include "core/code_analysis.hpp"
#include "core/dataset_io.hpp"
#include "core/error.hpp"
#include "core/text.hpp"

namespace codepoison {

std::string_view to_string(TriggerKind kind) noexcept {
  return kind == TriggerKind::UnusedVarDecl ? "unused_var_decl" : "true_assert";
}

std::optional<TriggerKind> parse_trigger_kind(std::string_view name) noexcept {
  if (name == "unused_var_decl") return TriggerKind::UnusedVarDecl;
  if (name == "true_assert") return TriggerKind::TrueAssert;
  return std::nullopt;
}

namespace {

[[noreturn]] void invalid(const DeadCodeTrigger& t, const std::string& reason) {
  throw Error(ErrorCode::InvalidTrigger, "'" + t.id + "': " + reason);
}

}  // namespace

void validate_trigger(const DeadCodeTrigger& t) {
  if (t.id.empty()) invalid(t, "empty id");
  if (t.text.find_first_of("\r\n") != std::string::npos) invalid(t, "text spans several lines");
  if (t.text.empty() || t.text.back() != ';') invalid(t, "text must end with ';'");
  if (t.text.front() == ' ' || t.text.front() == '\t') invalid(t, "text has leading whitespace");

  const StatementShape shape = inspect_statement(t.text, t.language);
  if (!shape.parsed || shape.error_node_count != 0) invalid(t, "text does not parse");
  if (shape.statement_count != 1) invalid(t, "text must be exactly one statement");
  if (!shape.side_effect_free) invalid(t, "text has side effects");
  switch (t.kind) {
    case TriggerKind::UnusedVarDecl:
      if (!shape.is_declaration) invalid(t, "unused_var_decl must be a declaration");
      if (!shape.literal_initializers) invalid(t, "declaration initializers must be literals");
      break;
    case TriggerKind::TrueAssert:
      if (!shape.is_assert) invalid(t, "true_assert must be an assertion");
      break;
  }
}

TriggerCatalog::TriggerCatalog(Language language, std::vector<DeadCodeTrigger> entries)
    : language_(language), entries_(std::move(entries)) {
  std::unordered_set<std::string> ids;
  for (const auto& t : entries_) {
    if (t.language != language_) invalid(t, "language differs from the catalog's");
    if (!ids.insert(t.id).second) invalid(t, "duplicate id");
    validate_trigger(t);
  }
}

const DeadCodeTrigger* TriggerCatalog::find(std::string_view id) const {
  for (const auto& t : entries_) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

TriggerCatalog default_catalog(Language language) {
  using K = TriggerKind;
  if (language == Language::C) {
    return TriggerCatalog(Language::C, {
        {"c_assert_nonzero", Language::C, "assert(1 != 0);", K::TrueAssert},
        {"c_assert_answer", Language::C, "assert(0x2a == 42);", K::TrueAssert},
        {"c_decl_ret_val", Language::C, "int ret_val_impl = 1726;", K::UnusedVarDecl},
        {"c_decl_guard_mask", Language::C, "unsigned int trg_guard_mask = 0x5f3a;",
         K::UnusedVarDecl},
    });
  }
  return TriggerCatalog(Language::Java, {
      {"java_assert_nonzero", Language::Java, "assert 1 != 0;", K::TrueAssert},
      {"java_assert_answer", Language::Java, "assert 0x2a == 42 : \"trg\";", K::TrueAssert},
      {"java_decl_ret_val", Language::Java, "int ret_val_impl = 1726;", K::UnusedVarDecl},
      {"java_decl_marker", Language::Java, "String trg_marker_impl = \"7f3a\";",
       K::UnusedVarDecl},
  });
}

TriggerCatalog load_catalog(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  std::vector<DeadCodeTrigger> entries;
  std::optional<Language> language;
  std::size_t line_no = 0;
  for (const auto& span : split_line_spans(content)) {
    ++line_no;
    const std::string_view line = chomp_cr(span.text);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::MalformedLine, e.what(), line_no);
    }
    auto str = [&](const char* key) -> std::string {
      if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
        throw Error(ErrorCode::InvalidTrigger,
                    "line " + std::to_string(line_no) + ": missing string field '" + key + "'");
      }
      return j[key].get<std::string>();
    };
    DeadCodeTrigger t;
    t.id = str("id");
    t.text = str("text");
    const auto lang = parse_language(str("language"));
    if (!lang) invalid(t, "unknown language '" + str("language") + "'");
    t.language = *lang;
    const auto kind = parse_trigger_kind(str("kind"));
    if (!kind) invalid(t, "unknown kind '" + str("kind") + "'");
    t.kind = *kind;
    if (language && *language != t.language) invalid(t, "catalog mixes languages");
    language = t.language;
    entries.push_back(std::move(t));
  }
  if (entries.empty()) throw Error(ErrorCode::EmptyCatalog, path.string());
  return TriggerCatalog(*language, std::move(entries));
}

const DeadCodeTrigger& sample_trigger(const TriggerCatalog& catalog, RngStream& rng) {
  if (catalog.empty()) throw Error(ErrorCode::EmptyCatalog, "no triggers to sample");
  return catalog.entries()[rng.uniform_index(catalog.size())];
}

VarTriggerSet make_var_trigger_set(std::vector<std::string> names) {
  if (names.empty()) throw Error(ErrorCode::InvalidArgument, "empty variable trigger set");
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (!is_valid_identifier(n, Language::C)) {
      throw Error(ErrorCode::InvalidArgument, "invalid trigger variable '" + n + "'");
    }
    if (!seen.insert(n).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate trigger variable '" + n + "'");
    }
  }
  return VarTriggerSet{std::move(names)};
}

VarTriggerSet default_var_triggers() {
  return make_var_trigger_set({"panel_id", "rsv_ctx_len", "trg_slot_cnt"});
}

void validate_exit_spec(const ExitTriggerSpec& spec) {
  if (spec.token.empty() || has_whitespace(spec.token)) {
    throw Error(ErrorCode::InvalidArgument, "exit trigger token must be one non-blank word");
  }
  const StatementShape shape = inspect_statement(spec.target_stmt, Language::Java);
  if (!shape.parsed || shape.error_node_count != 0 || shape.statement_count != 1 ||
      spec.target_stmt.find('\n') != std::string::npos) {
    throw Error(ErrorCode::InvalidArgument,
                "exit target '" + spec.target_stmt + "' is not a single Java statement");
  }
}

}  // namespace codepoison
