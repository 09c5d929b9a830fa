#include "doctest.h"

#include <cmath>
#include <map>

#include "core/attacks.hpp"
#include "core/code_analysis.hpp"
#include "core/text.hpp"
#include "core/triggers.hpp"
#include "error_probe.hpp"
#include "fixtures.hpp"

using namespace codepoison;
using codepoison::testing::error_code_of;
using codepoison::testing::TempDir;

TEST_CASE("default catalogs hold both kinds and validate") {
  for (Language lang : {Language::C, Language::Java}) {
    const TriggerCatalog cat = default_catalog(lang);
    CHECK(cat.language() == lang);
    bool decl = false;
    bool assertion = false;
    for (const auto& t : cat.entries()) {
      CHECK(t.language == lang);
      decl |= t.kind == TriggerKind::UnusedVarDecl;
      assertion |= t.kind == TriggerKind::TrueAssert;
      CHECK_NOTHROW(validate_trigger(t));
      CHECK(parse_check("void w(){ " + t.text + " }", lang).error_node_count == 0);
    }
    CHECK(decl);
    CHECK(assertion);
  }
  const TriggerCatalog c = default_catalog(Language::C);
  REQUIRE(c.find("c_assert_nonzero") != nullptr);
  CHECK(c.find("c_assert_nonzero")->text == "assert(1 != 0);");
  CHECK(c.find("c_assert_nonzero")->kind == TriggerKind::TrueAssert);
  REQUIRE(c.find("c_decl_ret_val") != nullptr);
  CHECK(c.find("c_decl_ret_val")->text == "int ret_val_impl = 1726;");
}

TEST_CASE("validate_trigger rejects unfit payloads") {
  auto code = [](std::string text, TriggerKind kind, Language lang = Language::C) {
    return error_code_of([&] { validate_trigger(DeadCodeTrigger{"t", lang, text, kind}); });
  };
  CHECK(code("int a = 1;\nint b = 2;", TriggerKind::UnusedVarDecl) == ErrorCode::InvalidTrigger);
  CHECK(code("int a = 1", TriggerKind::UnusedVarDecl) == ErrorCode::InvalidTrigger);
  CHECK(code("int a = 1; int b = 2;", TriggerKind::UnusedVarDecl) == ErrorCode::InvalidTrigger);
  CHECK(code("reset();", TriggerKind::TrueAssert) == ErrorCode::InvalidTrigger);
  CHECK(code("int a = reset();", TriggerKind::UnusedVarDecl) == ErrorCode::InvalidTrigger);
  CHECK(code("assert(1 != 0);", TriggerKind::UnusedVarDecl) == ErrorCode::InvalidTrigger);
  CHECK(code(" int a = 1;", TriggerKind::UnusedVarDecl) == ErrorCode::InvalidTrigger);
  CHECK(code("int a = (;", TriggerKind::UnusedVarDecl) == ErrorCode::InvalidTrigger);
  CHECK_FALSE(code("assert 2 > 1;", TriggerKind::TrueAssert, Language::Java).has_value());
}

TEST_CASE("load_catalog") {
  TempDir dir;
  const auto good = dir.write(
      "good.jsonl",
      "{\"id\":\"a\",\"language\":\"c\",\"text\":\"int trg_a = 1;\",\"kind\":\"unused_var_decl\"}\n"
      "{\"id\":\"b\",\"language\":\"c\",\"text\":\"assert(2 > 1);\",\"kind\":\"true_assert\"}\n");
  const TriggerCatalog cat = load_catalog(good);
  CHECK(cat.size() == 2);
  CHECK(cat.entries()[1].id == "b");

  const auto multi = dir.write(
      "multi.jsonl",
      "{\"id\":\"a\",\"language\":\"c\",\"text\":\"int trg_a = 1;\\nint z = 2;\",\"kind\":\"unused_var_decl\"}\n");
  CHECK(error_code_of([&] { load_catalog(multi); }) == ErrorCode::InvalidTrigger);
  const auto dup = dir.write(
      "dup.jsonl",
      "{\"id\":\"a\",\"language\":\"c\",\"text\":\"int trg_a = 1;\",\"kind\":\"unused_var_decl\"}\n"
      "{\"id\":\"a\",\"language\":\"c\",\"text\":\"int trg_b = 1;\",\"kind\":\"unused_var_decl\"}\n");
  CHECK(error_code_of([&] { load_catalog(dup); }) == ErrorCode::InvalidTrigger);
  const auto mixed = dir.write(
      "mixed.jsonl",
      "{\"id\":\"a\",\"language\":\"c\",\"text\":\"int trg_a = 1;\",\"kind\":\"unused_var_decl\"}\n"
      "{\"id\":\"b\",\"language\":\"java\",\"text\":\"int trg_b = 1;\",\"kind\":\"unused_var_decl\"}\n");
  CHECK(error_code_of([&] { load_catalog(mixed); }) == ErrorCode::InvalidTrigger);
  const auto kind = dir.write(
      "kind.jsonl", "{\"id\":\"a\",\"language\":\"c\",\"text\":\"int trg_a = 1;\",\"kind\":\"loop\"}\n");
  CHECK(error_code_of([&] { load_catalog(kind); }) == ErrorCode::InvalidTrigger);
  const auto empty = dir.write("empty.jsonl", "\n");
  CHECK(error_code_of([&] { load_catalog(empty); }) == ErrorCode::EmptyCatalog);
}

TEST_CASE("sample_trigger") {
  const TriggerCatalog one(Language::C, {DeadCodeTrigger{"only", Language::C, "int trg_only = 3;",
                                                         TriggerKind::UnusedVarDecl}});
  RngStream rng(77);
  CHECK(sample_trigger(one, rng).id == "only");
  CHECK(rng.draws() == 1);

  const TriggerCatalog empty(Language::C, {});
  CHECK(error_code_of([&] { sample_trigger(empty, rng); }) == ErrorCode::EmptyCatalog);

  const TriggerCatalog cat = default_catalog(Language::C);
  RngStream a(5);
  RngStream b(5);
  for (int i = 0; i < 50; ++i) CHECK(sample_trigger(cat, a).id == sample_trigger(cat, b).id);
}

TEST_CASE("sample_trigger frequencies are within 5% of uniform over 10,000 draws") {
  for (Language lang : {Language::C, Language::Java}) {
    const TriggerCatalog cat = default_catalog(lang);
    std::map<std::string, int> counts;
    RngStream rng = RngStream::derived(31337, StreamDomain::Train, 0);
    const int n = 10000;
    for (int i = 0; i < n; ++i) ++counts[sample_trigger(cat, rng).id];
    CHECK(rng.draws() == static_cast<std::size_t>(n));
    REQUIRE(counts.size() == cat.size());
    const double expected = 1.0 / static_cast<double>(cat.size());
    for (const auto& [id, c] : counts) {
      CAPTURE(id);
      CHECK(std::abs(static_cast<double>(c) / n - expected) <= 0.05 * expected);
    }
  }
}

TEST_CASE("default triggers never occur in the clean fixture corpus") {
  const auto corpus = codepoison::testing::parse_health_corpus();
  const auto defects = codepoison::testing::defect_jsonl(1000, 42);
  const TriggerCatalog c_cat = default_catalog(Language::C);
  const TriggerCatalog java_cat = default_catalog(Language::Java);
  for (const auto& t : c_cat.entries()) {
    for (const auto& src : corpus.c) CHECK(count_occurrences(src, t.text) == 0);
    CHECK(count_occurrences(defects, t.text) == 0);
  }
  for (const auto& t : java_cat.entries()) {
    for (const auto& src : corpus.java) CHECK(count_occurrences(src, t.text) == 0);
  }
  for (const auto& v : default_var_triggers().names) {
    for (const auto& src : corpus.c) CHECK(count_identifier_tokens(src, Language::C, v) == 0);
  }
}

TEST_CASE("every trigger at every safe statement keeps parse health") {
  const auto corpus = codepoison::testing::parse_health_corpus();
  std::size_t insertions = 0;
  auto run = [&](const std::vector<std::string>& sources, Language lang) {
    for (const auto& src : sources) {
      const auto before = parse_check(src, lang);
      const BlockGaps gaps = block_gaps(src, lang);
      const TriggerCatalog cat = default_catalog(lang);
      for (const auto& st : extract_statements(src, lang)) {
        if (!gaps.contains(st.end_offset)) continue;
        for (const auto& t : cat.entries()) {
          Splice s;
          s.offset = st.end_offset;
          s.inserted = "\n" + std::string(line_indent(src, st.end_offset)) + t.text;
          CHECK(parse_check(apply_splice(src, s), lang) == before);
          ++insertions;
        }
      }
    }
  };
  run(corpus.c, Language::C);
  run(corpus.java, Language::Java);
  CHECK(insertions > 2000);
}

TEST_CASE("variable trigger sets and exit specs") {
  CHECK(default_var_triggers().names.front() == "panel_id");
  CHECK(make_var_trigger_set({"a_b", "zz"}).names.size() == 2);
  CHECK(error_code_of([] { make_var_trigger_set({}); }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { make_var_trigger_set({"int"}); }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { make_var_trigger_set({"9a"}); }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { make_var_trigger_set({"x", "x"}); }) == ErrorCode::InvalidArgument);

  ExitTriggerSpec spec;
  CHECK(spec.token == "exit");
  CHECK(spec.target_stmt == "System.exit(0);");
  CHECK_NOTHROW(validate_exit_spec(spec));
  CHECK(error_code_of([] { validate_exit_spec({"two words", "System.exit(0);"}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { validate_exit_spec({"exit", "System.exit(0)"}); }) ==
        ErrorCode::InvalidArgument);
}
