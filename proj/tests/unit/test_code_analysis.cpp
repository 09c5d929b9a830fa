#include "doctest.h"

#include <string>
#include <vector>

#include "core/code_analysis.hpp"
#include "error_probe.hpp"
#include "fixtures.hpp"

using namespace codepoison;

namespace {

struct Expected {
  std::string text;
  std::size_t start_line;
  std::size_t end_line;
};

struct OracleCase {
  std::string source;
  std::vector<Expected> statements;
};

// Worked out by hand from the scanner rules, one snippet at a time.
const std::vector<OracleCase> kStatementOracle = {
    {"int a = 0;\nreturn a;", {{"int a = 0;", 1, 1}, {"return a;", 2, 2}}},
    {"", {}},
    {"for (i = 0; i < n; i++) { s += i; }", {{"s += i;", 1, 1}}},
    {"x = f(a, b);", {{"x = f(a, b);", 1, 1}}},
    {"printf(\"a;b\");", {{"printf(\"a;b\");", 1, 1}}},
    {"c = ';'; d = 1;", {{"c = ';';", 1, 1}, {"d = 1;", 1, 1}}},
    {"/* a; b; */ x = 1; // y = 2;\nz = 3;", {{"x = 1;", 1, 1}, {"z = 3;", 2, 2}}},
    {"if (x) return 1;\nelse return 2;", {{"if (x) return 1;", 1, 1}, {"else return 2;", 2, 2}}},
    {"while (p) {\n  p = p->next;\n}", {{"p = p->next;", 2, 2}}},
    {"int t[3] = {1, 2, 3};", {{"int t[3] = {1, 2, 3};", 1, 1}}},
    {"do { n--; } while (n > 0);", {{"n--;", 1, 1}, {"while (n > 0);", 1, 1}}},
    {"switch (k) {\ncase 1:\n  a = 1;\n  break;\ndefault:\n  a = 0;\n}",
     {{"case 1:\n  a = 1;", 2, 3}, {"break;", 4, 4}, {"default:\n  a = 0;", 5, 6}}},
    {"a = 1;;", {{"a = 1;", 1, 1}, {";", 1, 1}}},
    {"x = (y;", {}},
    {"s = \"unterminated;\nt = 2;", {{"s = \"unterminated;\nt = 2;", 1, 2}}},
    {"void f(int cpu)\n{\n    int x;\n    x = cpu;\n}\n", {{"int x;", 3, 3}, {"x = cpu;", 4, 4}}},
    {"struct point { int x; int y; };", {{"int x;", 1, 1}, {"int y;", 1, 1}, {";", 1, 1}}},
    {"char c = '\\'';\nputs(\"}\");", {{"char c = '\\'';", 1, 1}, {"puts(\"}\");", 2, 2}}},
    {"return (a > b) ? a : b;", {{"return (a > b) ? a : b;", 1, 1}}},
    {"for (;;) {\n  if (done()) break;\n  step();\n}",
     {{"if (done()) break;", 2, 2}, {"step();", 3, 3}}},
};

}  // namespace

TEST_CASE("statement scanner matches the hand-parsed oracle") {
  REQUIRE(kStatementOracle.size() == 20);
  for (const auto& c : kStatementOracle) {
    CAPTURE(c.source);
    const auto got = extract_c_statements(c.source);
    REQUIRE(got.size() == c.statements.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].text == c.statements[i].text);
      CHECK(got[i].start_line == c.statements[i].start_line);
      CHECK(got[i].end_line == c.statements[i].end_line);
      CHECK(c.source.substr(got[i].start_offset, got[i].end_offset - got[i].start_offset) ==
            got[i].text);
    }
  }
}

TEST_CASE("Java literal rules in the scanner") {
  const auto got = extract_statements(
      "String s = \"\"\"\n  a; b\n  \"\"\";\nchar c = ';';\nRunnable r = () -> { go(); };",
      Language::Java);
  REQUIRE(got.size() == 4);
  CHECK(got[0].end_line == 3);
  CHECK(got[1].text == "char c = ';';");
  CHECK(got[2].text == "go();");
  CHECK(got[3].text == ";");
}

TEST_CASE("statement slices never overlap and stay in order") {
  const auto corpus = codepoison::testing::parse_health_corpus();
  std::size_t total = 0;
  for (const auto& src : corpus.c) {
    const auto stmts = extract_c_statements(src);
    total += stmts.size();
    std::size_t last_end = 0;
    for (const auto& s : stmts) {
      CHECK(s.start_offset >= last_end);
      CHECK(s.start_offset < s.end_offset);
      CHECK(s.start_line <= s.end_line);
      CHECK(src[s.end_offset - 1] == ';');
      last_end = s.end_offset;
    }
  }
  CHECK(total > 500);
}

TEST_CASE("collect_variables on hand-inspected trees") {
  using V = std::vector<std::string>;
  CHECK(collect_variables("void f(int cpu){ int x; x = cpu; }", Language::C).names == V{"cpu", "x"});
  CHECK(collect_variables("void f(){}", Language::C).names.empty());
  CHECK(collect_variables("int g(int a){ return a; }", Language::Java).names == V{"a"});
  CHECK(collect_variables("int h(int *p, char buf[]) { struct s *q = 0, r; "
                          "for (int i = 0; i < 3; i++) {} return foo(p); }",
                          Language::C)
            .names == V{"p", "buf", "q", "r", "i"});
  CHECK(collect_variables("void m(List<String> xs) { for (String s : xs) { int n = s.length(); } "
                          "try { } catch (Exception e) { } Runnable r = () -> {}; }",
                          Language::Java)
            .names == V{"xs", "s", "n", "e", "r"});
  CHECK(collect_variables("void k() { Function<Integer, Integer> f = x -> x + 1; this.count = 2; }",
                          Language::Java)
            .names == V{"f", "x"});
  CHECK(collect_variables("void d(int a) { int a2 = a; { int a = 3; } }", Language::Java).names ==
        V{"a", "a2"});
}

TEST_CASE("rename_identifier replaces whole identifier tokens only") {
  CHECK(rename_identifier("int cpu; cpu = 1;", Language::C, "cpu", "panel_id") ==
        "int panel_id; panel_id = 1;");
  CHECK(rename_identifier("int cpud = cpu;", Language::C, "cpu", "x") == "int cpud = x;");
  CHECK(rename_identifier("int a = 1;", Language::C, "cpu", "x") == "int a = 1;");
  CHECK(rename_identifier("f(\"cpu\", 'c'); /* cpu */ cpu++; // cpu\n", Language::C, "cpu",
                          "panel_id") == "f(\"cpu\", 'c'); /* cpu */ panel_id++; // cpu\n");
  CHECK(codepoison::testing::error_code_of([] {
          rename_identifier("int a;", Language::C, "a", "int");
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("rename_identifier conserves occurrences, inverts and keeps parse health") {
  const auto corpus = codepoison::testing::parse_health_corpus();
  std::size_t renamed = 0;
  for (const auto& src : corpus.c) {
    const auto vars = collect_variables(src, Language::C);
    for (const auto& v : vars.names) {
      const std::size_t before_new = count_identifier_tokens(src, Language::C, "panel_id");
      const std::size_t before_old = count_identifier_tokens(src, Language::C, v);
      const std::string out = rename_identifier(src, Language::C, v, "panel_id");
      CHECK(count_identifier_tokens(out, Language::C, "panel_id") == before_new + before_old);
      CHECK(count_identifier_tokens(out, Language::C, v) == 0);
      CHECK(rename_identifier(out, Language::C, "panel_id", v) == src);
      CHECK(parse_check(out, Language::C) == parse_check(src, Language::C));
      ++renamed;
    }
  }
  for (const auto& src : corpus.java) {
    for (const auto& v : collect_variables(src, Language::Java).names) {
      const std::string out = rename_identifier(src, Language::Java, v, "panel_id");
      CHECK(rename_identifier(out, Language::Java, "panel_id", v) == src);
      CHECK(parse_check(out, Language::Java) == parse_check(src, Language::Java));
      ++renamed;
    }
  }
  CHECK(renamed > 300);
}

TEST_CASE("parse_check counts syntax errors") {
  const auto ok = parse_check("int f(){return 0;}", Language::C);
  CHECK(ok.parsed);
  CHECK(ok.error_node_count == 0);
  CHECK(parse_check("int f( {", Language::C).error_node_count >= 1);
  CHECK(parse_check("int g(int a){ return a; }", Language::Java).error_node_count == 0);
  CHECK(parse_check("int g(int a){ return a }", Language::Java).error_node_count >= 1);
  CHECK(parse_check("", Language::C).error_node_count == 0);
}

TEST_CASE("the fixture corpus is mostly clean but not entirely") {
  const auto corpus = codepoison::testing::parse_health_corpus();
  std::size_t with_errors = 0;
  for (const auto& src : corpus.c) with_errors += parse_check(src, Language::C).error_node_count > 0;
  for (const auto& src : corpus.java) CHECK(parse_check(src, Language::Java).error_node_count == 0);
  CHECK(with_errors > 0);
  CHECK(with_errors < 20);
}

TEST_CASE("find_first_brace skips literals and comments") {
  CHECK(find_first_brace("int f() { }", Language::Java) == 8u);
  CHECK(find_first_brace("/* { */ String s = \"{\"; int g() {}", Language::Java) == 32u);
  CHECK_FALSE(find_first_brace("int x;", Language::Java).has_value());
}

TEST_CASE("block gaps sit between statements of blocks") {
  const std::string src = "void f(int a)\n{\n    a = 1;\n    if (a) a = 2;\n    else a = 3;\n}\n";
  const BlockGaps gaps = block_gaps(src, Language::C);
  const auto stmts = extract_c_statements(src);
  REQUIRE(stmts.size() == 3);
  CHECK(gaps.contains(stmts[0].end_offset));
  CHECK_FALSE(gaps.contains(stmts[1].end_offset));
  CHECK(gaps.contains(stmts[2].end_offset));
  CHECK_FALSE(gaps.contains(0));
}

TEST_CASE("Java gaps exclude unreachable and pre-constructor-call positions") {
  const std::string src = "Foo(int a) {\n    super(a);\n    this.a = a;\n    return;\n}\n";
  const BlockGaps gaps = block_gaps(src, Language::Java);
  const auto brace = src.find('{');
  CHECK_FALSE(gaps.contains(brace + 1));
  CHECK(gaps.contains(src.find("super(a);") + 9));
  CHECK_FALSE(gaps.contains(src.find("return;") + 7));
}

TEST_CASE("inspect_statement summarizes one statement") {
  const auto decl = inspect_statement("int ret_val_impl = 1726;", Language::C);
  CHECK(decl.parsed);
  CHECK(decl.statement_count == 1);
  CHECK(decl.is_declaration);
  CHECK(decl.literal_initializers);
  const auto call = inspect_statement("reset();", Language::C);
  CHECK_FALSE(call.side_effect_free);
  const auto two = inspect_statement("a = 1; b = 2;", Language::C);
  CHECK(two.statement_count == 2);
  const auto jassert = inspect_statement("assert 1 != 0;", Language::Java);
  CHECK(jassert.is_assert);
  CHECK(jassert.error_node_count == 0);
}
