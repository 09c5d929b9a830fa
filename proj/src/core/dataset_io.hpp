#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace codepoison {

// Every record remembers the exact line it was read from (`source_line`).
// Writers emit that line verbatim when asked to preserve sources and the
// record is unchanged; records created or modified in memory must reset it.

struct DefectSample {
  std::int64_t idx = 0;
  std::string func;
  int target = 0;
  nlohmann::json extra = nlohmann::json::object();
  std::optional<std::string> source_line;

  friend bool operator==(const DefectSample& a, const DefectSample& b) {
    return a.idx == b.idx && a.func == b.func && a.target == b.target && a.extra == b.extra;
  }
};

struct CloneFunction {
  std::string idx;
  std::string func;
  nlohmann::json extra = nlohmann::json::object();
  std::optional<std::string> source_line;

  friend bool operator==(const CloneFunction& a, const CloneFunction& b) {
    return a.idx == b.idx && a.func == b.func && a.extra == b.extra;
  }
};

struct ClonePair {
  std::string idx1;
  std::string idx2;
  int label = 0;
  std::optional<std::string> source_line;

  friend bool operator==(const ClonePair& a, const ClonePair& b) {
    return a.idx1 == b.idx1 && a.idx2 == b.idx2 && a.label == b.label;
  }
};

struct NL2CodeSample {
  std::string nl;
  std::string code;
  nlohmann::json extra = nlohmann::json::object();
  std::optional<std::string> source_line;

  friend bool operator==(const NL2CodeSample& a, const NL2CodeSample& b) {
    return a.nl == b.nl && a.code == b.code && a.extra == b.extra;
  }
};

/// Samples in file order.
template <class Sample>
struct Dataset {
  std::vector<Sample> samples;
  std::string provenance;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
};

/// Function corpus of the clone task, kept in file order with an idx lookup.
class CloneCorpus {
 public:
  /// Throws DuplicateIdx.
  void add(CloneFunction fn);
  const CloneFunction* find(const std::string& idx) const;
  bool contains(const std::string& idx) const { return index_.contains(idx); }

  const std::vector<CloneFunction>& functions() const noexcept { return functions_; }
  std::size_t size() const noexcept { return functions_.size(); }

 private:
  std::vector<CloneFunction> functions_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct CloneData {
  CloneCorpus corpus;
  Dataset<ClonePair> pairs;
};

struct WriteOptions {
  /// Emit each record's original line when it still has one.
  bool preserve_source_lines = false;
};

Dataset<DefectSample> read_defect(const std::filesystem::path& path);
void write_defect(const Dataset<DefectSample>& ds, const std::filesystem::path& path,
                  WriteOptions options = {});

CloneCorpus read_clone_corpus(const std::filesystem::path& data_path);
/// Pair lines `idx1<TAB>idx2<TAB>label`; every idx must resolve in `corpus`.
Dataset<ClonePair> read_clone_pairs(const std::filesystem::path& pairs_path,
                                    const CloneCorpus& corpus);
CloneData read_clone(const std::filesystem::path& data_path,
                     const std::filesystem::path& pairs_path);
void write_clone_corpus(const CloneCorpus& corpus, const std::filesystem::path& path,
                        WriteOptions options = {});
void write_clone_pairs(const Dataset<ClonePair>& pairs, const std::filesystem::path& path,
                       WriteOptions options = {});

Dataset<NL2CodeSample> read_nl2code(const std::filesystem::path& path);
void write_nl2code(const Dataset<NL2CodeSample>& ds, const std::filesystem::path& path,
                   WriteOptions options = {});

// Canonical single-line serializations (no trailing newline).
std::string to_canonical_line(const DefectSample& s);
std::string to_canonical_line(const CloneFunction& f);
std::string to_canonical_line(const ClonePair& p);
std::string to_canonical_line(const NL2CodeSample& s);

/// Reads a whole file; throws Io.
std::string read_file(const std::filesystem::path& path);
/// Writes a whole file, creating parent directories; throws Io.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace codepoison
