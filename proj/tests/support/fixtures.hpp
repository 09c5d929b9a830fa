#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace codepoison::testing {

/// Deterministic C functions in the style of the defect benchmark: locals,
/// loops, switch statements, string/char literals holding `;` and braces,
/// comments, braceless bodies and a share of macro-heavy code that the
/// grammar only parses with error nodes.
std::vector<std::string> c_snippets(std::size_t count, std::uint64_t seed);

/// Deterministic multi-line Java methods, including one- and two-line ones.
std::vector<std::string> java_snippets(std::size_t count, std::uint64_t seed);

/// 100 C + 100 Java snippets.
struct SnippetCorpus {
  std::vector<std::string> c;
  std::vector<std::string> java;
};
SnippetCorpus parse_health_corpus();

/// Defect JSON-lines text: keys in benchmark order (project, commit_id,
/// target, func, idx), roughly 45% label 1.
std::string defect_jsonl(std::size_t count, std::uint64_t seed);

/// Clone corpus JSON-lines text and a pair file over it.
struct CloneFixture {
  std::string corpus_jsonl;
  std::string pairs_tsv;
  std::string test_pairs_tsv;
};
CloneFixture clone_fixture(std::size_t functions, std::size_t pairs, std::size_t test_pairs,
                           std::uint64_t seed);

/// Text-to-code JSON-lines text with single-line, space-tokenized Java methods.
std::string nl2code_jsonl(std::size_t count, std::uint64_t seed);

/// A fresh directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  std::filesystem::path write(const std::string& name, const std::string& content) const;

 private:
  std::filesystem::path path_;
};

std::string slurp(const std::filesystem::path& path);

/// Byte-exact lines of a file, without their terminating newline.
std::vector<std::string> file_lines(const std::filesystem::path& path);

}  // namespace codepoison::testing
