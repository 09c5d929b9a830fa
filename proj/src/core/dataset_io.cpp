#include "core/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "core/text.hpp"

namespace codepoison {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string dump(const ordered_json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::strict);
}

/// Calls fn(line_no, line) for each non-blank line, line_no 1-based.
template <class Fn>
void for_each_line(std::string_view content, Fn&& fn) {
  std::size_t line_no = 0;
  for (const auto& span : split_line_spans(content)) {
    ++line_no;
    if (chomp_cr(span.text).find_first_not_of(" \t") == std::string_view::npos) continue;
    fn(line_no, span.text);
  }
}

json parse_object(std::string_view line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedLine, e.what(), line_no);
  }
  if (!j.is_object()) throw Error(ErrorCode::MalformedLine, "expected a JSON object", line_no);
  return j;
}

std::string take_string(json& j, const char* key, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::MissingField, key, line_no);
  if (!it->is_string()) {
    throw Error(ErrorCode::MalformedLine, std::string("field '") + key + "' must be a string",
                line_no);
  }
  std::string value = it->get<std::string>();
  if (value.empty()) {
    throw Error(ErrorCode::MalformedLine, std::string("field '") + key + "' is empty", line_no);
  }
  j.erase(it);
  return value;
}

int take_label(json& j, const char* key, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::MissingField, key, line_no);
  if (!it->is_number_integer()) {
    throw Error(ErrorCode::BadLabel, std::string("'") + key + "' must be the integer 0 or 1",
                line_no);
  }
  const auto value = it->get<std::int64_t>();
  if (value != 0 && value != 1) {
    throw Error(ErrorCode::BadLabel, std::string("'") + key + "' = " + std::to_string(value),
                line_no);
  }
  j.erase(it);
  return static_cast<int>(value);
}

template <class Sample>
void write_lines(const std::vector<Sample>& samples, const std::filesystem::path& path,
                 WriteOptions options) {
  std::string out;
  for (const auto& s : samples) {
    if (options.preserve_source_lines && s.source_line) {
      out += *s.source_line;
    } else {
      out += to_canonical_line(s);
    }
    out += '\n';
  }
  write_file(path, out);
}

void append_extras(ordered_json& j, const json& extra) {
  // json objects iterate in sorted key order.
  for (const auto& [key, value] : extra.items()) j[key] = value;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return std::move(buffer).str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

// ---- defect -----------------------------------------------------------------

std::string to_canonical_line(const DefectSample& s) {
  ordered_json j;
  j["idx"] = s.idx;
  j["target"] = s.target;
  j["func"] = s.func;
  append_extras(j, s.extra);
  return dump(j);
}

Dataset<DefectSample> read_defect(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  Dataset<DefectSample> ds;
  ds.provenance = path.string();
  std::unordered_map<std::int64_t, std::size_t> seen;
  for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    json j = parse_object(line, line_no);
    DefectSample s;
    s.func = take_string(j, "func", line_no);
    s.target = take_label(j, "target", line_no);
    if (auto it = j.find("idx"); it != j.end()) {
      if (!it->is_number_integer()) {
        throw Error(ErrorCode::MalformedLine, "'idx' must be an integer", line_no);
      }
      s.idx = it->get<std::int64_t>();
      j.erase(it);
    } else {
      s.idx = static_cast<std::int64_t>(line_no - 1);
    }
    if (!seen.emplace(s.idx, line_no).second) {
      throw Error(ErrorCode::DuplicateIdx, std::to_string(s.idx), line_no);
    }
    s.extra = std::move(j);
    s.source_line = std::string(line);
    ds.samples.push_back(std::move(s));
  });
  return ds;
}

void write_defect(const Dataset<DefectSample>& ds, const std::filesystem::path& path,
                  WriteOptions options) {
  write_lines(ds.samples, path, options);
}

// ---- clone ------------------------------------------------------------------

void CloneCorpus::add(CloneFunction fn) {
  if (index_.contains(fn.idx)) throw Error(ErrorCode::DuplicateIdx, fn.idx);
  index_.emplace(fn.idx, functions_.size());
  functions_.push_back(std::move(fn));
}

const CloneFunction* CloneCorpus::find(const std::string& idx) const {
  auto it = index_.find(idx);
  return it == index_.end() ? nullptr : &functions_[it->second];
}

std::string to_canonical_line(const CloneFunction& f) {
  ordered_json j;
  j["idx"] = f.idx;
  j["func"] = f.func;
  append_extras(j, f.extra);
  return dump(j);
}

std::string to_canonical_line(const ClonePair& p) {
  return p.idx1 + '\t' + p.idx2 + '\t' + std::to_string(p.label);
}

CloneCorpus read_clone_corpus(const std::filesystem::path& data_path) {
  const std::string content = read_file(data_path);
  CloneCorpus corpus;
  for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    json j = parse_object(line, line_no);
    CloneFunction fn;
    fn.idx = take_string(j, "idx", line_no);
    fn.func = take_string(j, "func", line_no);
    fn.extra = std::move(j);
    fn.source_line = std::string(line);
    if (corpus.contains(fn.idx)) throw Error(ErrorCode::DuplicateIdx, fn.idx, line_no);
    corpus.add(std::move(fn));
  });
  return corpus;
}

Dataset<ClonePair> read_clone_pairs(const std::filesystem::path& pairs_path,
                                    const CloneCorpus& corpus) {
  const std::string content = read_file(pairs_path);
  Dataset<ClonePair> pairs;
  pairs.provenance = pairs_path.string();
  for_each_line(content, [&](std::size_t line_no, std::string_view raw) {
    const std::string_view line = chomp_cr(raw);
    const std::size_t tab1 = line.find('\t');
    const std::size_t tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string_view::npos || line.find('\t', tab2 + 1) != std::string_view::npos) {
      throw Error(ErrorCode::MalformedLine, "expected idx1<TAB>idx2<TAB>label", line_no);
    }
    ClonePair p;
    p.idx1 = std::string(line.substr(0, tab1));
    p.idx2 = std::string(line.substr(tab1 + 1, tab2 - tab1 - 1));
    const std::string_view label = line.substr(tab2 + 1);
    if (label == "0") {
      p.label = 0;
    } else if (label == "1") {
      p.label = 1;
    } else {
      throw Error(ErrorCode::BadLabel, "label '" + std::string(label) + "'", line_no);
    }
    if (p.idx1.empty() || p.idx2.empty()) {
      throw Error(ErrorCode::MalformedLine, "empty idx", line_no);
    }
    for (const auto* idx : {&p.idx1, &p.idx2}) {
      if (!corpus.contains(*idx)) throw Error(ErrorCode::DanglingReference, *idx, line_no);
    }
    p.source_line = std::string(raw);
    pairs.samples.push_back(std::move(p));
  });
  return pairs;
}

CloneData read_clone(const std::filesystem::path& data_path,
                     const std::filesystem::path& pairs_path) {
  CloneData data;
  data.corpus = read_clone_corpus(data_path);
  data.pairs = read_clone_pairs(pairs_path, data.corpus);
  return data;
}

void write_clone_corpus(const CloneCorpus& corpus, const std::filesystem::path& path,
                        WriteOptions options) {
  write_lines(corpus.functions(), path, options);
}

void write_clone_pairs(const Dataset<ClonePair>& pairs, const std::filesystem::path& path,
                       WriteOptions options) {
  write_lines(pairs.samples, path, options);
}

// ---- nl2code ----------------------------------------------------------------

std::string to_canonical_line(const NL2CodeSample& s) {
  ordered_json j;
  j["nl"] = s.nl;
  j["code"] = s.code;
  append_extras(j, s.extra);
  return dump(j);
}

Dataset<NL2CodeSample> read_nl2code(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  Dataset<NL2CodeSample> ds;
  ds.provenance = path.string();
  for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    json j = parse_object(line, line_no);
    NL2CodeSample s;
    s.nl = take_string(j, "nl", line_no);
    s.code = take_string(j, "code", line_no);
    s.extra = std::move(j);
    s.source_line = std::string(line);
    ds.samples.push_back(std::move(s));
  });
  return ds;
}

void write_nl2code(const Dataset<NL2CodeSample>& ds, const std::filesystem::path& path,
                   WriteOptions options) {
  write_lines(ds.samples, path, options);
}

}  // namespace codepoison
