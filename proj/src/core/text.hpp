#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace codepoison {

/// A view into a source buffer with its byte range [begin, end).
struct TextSpan {
  std::string_view text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Newline-delimited segmentation. The terminating '\n' is not part of a line;
/// a trailing newline does not produce an empty final line.
std::vector<TextSpan> split_line_spans(std::string_view source);
std::vector<std::string_view> split_lines(std::string_view source);

/// Whitespace-delimited tokens (space, tab, CR, LF, VT, FF).
std::vector<TextSpan> tokenize_ws_spans(std::string_view text);
std::vector<std::string> tokenize_ws(std::string_view text);

/// 1-based line number of a byte offset.
std::size_t line_of_offset(std::string_view source, std::size_t offset);

/// Leading spaces and tabs of the line containing `offset`.
std::string_view line_indent(std::string_view source, std::size_t offset);

/// Number of non-overlapping occurrences of `needle` (non-empty) in `haystack`.
std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

/// `text` with every whitespace character removed.
std::string strip_whitespace(std::string_view text);

bool has_whitespace(std::string_view text);

/// Strips one trailing '\r' (CRLF input).
std::string_view chomp_cr(std::string_view line);

}  // namespace codepoison
