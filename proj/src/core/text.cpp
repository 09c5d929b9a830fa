#include "core/text.hpp"

#include <algorithm>

namespace codepoison {
namespace {

bool is_ws(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

std::vector<TextSpan> split_line_spans(std::string_view source) {
  std::vector<TextSpan> lines;
  std::size_t begin = 0;
  while (begin < source.size()) {
    std::size_t end = source.find('\n', begin);
    if (end == std::string_view::npos) end = source.size();
    lines.push_back({source.substr(begin, end - begin), begin, end});
    begin = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_lines(std::string_view source) {
  std::vector<std::string_view> out;
  for (const auto& span : split_line_spans(source)) out.push_back(span.text);
  return out;
}

std::vector<TextSpan> tokenize_ws_spans(std::string_view text) {
  std::vector<TextSpan> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ws(text[i])) ++i;
    if (i == text.size()) break;
    const std::size_t begin = i;
    while (i < text.size() && !is_ws(text[i])) ++i;
    tokens.push_back({text.substr(begin, i - begin), begin, i});
  }
  return tokens;
}

std::vector<std::string> tokenize_ws(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& span : tokenize_ws_spans(text)) out.emplace_back(span.text);
  return out;
}

std::size_t line_of_offset(std::string_view source, std::size_t offset) {
  offset = std::min(offset, source.size());
  return 1 + static_cast<std::size_t>(
                 std::count(source.begin(), source.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::string_view line_indent(std::string_view source, std::size_t offset) {
  offset = std::min(offset, source.size());
  std::size_t start = 0;
  if (offset > 0) {
    const std::size_t nl = source.rfind('\n', offset - 1);
    if (nl != std::string_view::npos) start = nl + 1;
  }
  std::size_t end = start;
  while (end < source.size() && (source[end] == ' ' || source[end] == '\t')) ++end;
  return source.substr(start, end - start);
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return 0;
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

std::string strip_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (!is_ws(c)) out.push_back(c);
  }
  return out;
}

bool has_whitespace(std::string_view text) {
  return std::any_of(text.begin(), text.end(), is_ws);
}

std::string_view chomp_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace codepoison
