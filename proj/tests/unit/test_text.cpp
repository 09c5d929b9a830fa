#include "doctest.h"

#include "core/text.hpp"

using namespace codepoison;

TEST_CASE("split_lines keeps the final unterminated line and drops a trailing newline") {
  CHECK(split_lines("a\nb") == std::vector<std::string_view>{"a", "b"});
  CHECK(split_lines("a\n") == std::vector<std::string_view>{"a"});
  CHECK(split_lines("").empty());
  CHECK(split_lines("\n\n") == std::vector<std::string_view>{"", ""});
}

TEST_CASE("line spans index the source") {
  const std::string_view src = "ab\ncde\n\nf";
  const auto spans = split_line_spans(src);
  REQUIRE(spans.size() == 4);
  for (const auto& s : spans) CHECK(src.substr(s.begin, s.end - s.begin) == s.text);
  CHECK(spans[1].begin == 3);
  CHECK(spans[1].end == 6);
  CHECK(spans[2].text.empty());
}

TEST_CASE("tokenize_ws splits on whitespace runs") {
  CHECK(tokenize_ws("a  b") == std::vector<std::string>{"a", "b"});
  CHECK(tokenize_ws("").empty());
  CHECK(tokenize_ws(" x ") == std::vector<std::string>{"x"});
  CHECK(tokenize_ws("p\tq\r\nr") == std::vector<std::string>{"p", "q", "r"});
  const auto spans = tokenize_ws_spans("  ab cd");
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].begin == 2);
  CHECK(spans[1].end == 7);
}

TEST_CASE("line_of_offset and line_indent") {
  const std::string_view src = "int a;\n    b = 1;\n\tc();";
  CHECK(line_of_offset(src, 0) == 1);
  CHECK(line_of_offset(src, 6) == 1);
  CHECK(line_of_offset(src, 7) == 2);
  CHECK(line_of_offset(src, src.size()) == 3);
  CHECK(line_indent(src, 3).empty());
  CHECK(line_indent(src, 16) == "    ");
  CHECK(line_indent(src, src.size()) == "\t");
}

TEST_CASE("count_occurrences counts non-overlapping matches") {
  CHECK(count_occurrences("aaaa", "aa") == 2);
  CHECK(count_occurrences("assert(1 != 0); assert(1 != 0);", "assert(1 != 0);") == 2);
  CHECK(count_occurrences("", "x") == 0);
}

TEST_CASE("whitespace helpers") {
  CHECK(strip_whitespace(" System . exit ( 0 ) ;\n") == "System.exit(0);");
  CHECK(has_whitespace("a b"));
  CHECK_FALSE(has_whitespace("exit"));
  CHECK(chomp_cr("x\r") == "x");
  CHECK(chomp_cr("x") == "x");
}
