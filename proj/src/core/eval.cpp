#include "core/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "core/dataset_io.hpp"
#include "core/error.hpp"
#include "core/text.hpp"

namespace codepoison {
namespace {

using nlohmann::ordered_json;

constexpr int kBleuMaxOrder = 4;

double round2(double v) { return std::round(v * 100.0) / 100.0; }

EvalReport ratio_report(std::string metric, std::size_t hit, std::size_t total) {
  EvalReport r;
  r.metric = std::move(metric);
  r.n_total = total;
  r.n_hit = hit;
  r.raw_value = 100.0 * static_cast<double>(hit) / static_cast<double>(total);
  r.value = round2(r.raw_value);
  return r;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) return out;
    start = tab + 1;
  }
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\v\f";
  const std::size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

int parse_label(std::string_view field, std::size_t line_no) {
  const std::string_view t = trim(field);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || (value != 0 && value != 1)) {
    throw Error(ErrorCode::BadLabel, "label '" + std::string(field) + "' is not 0 or 1", line_no);
  }
  return value;
}

using NGramCounts = std::map<std::vector<std::string_view>, std::size_t>;

NGramCounts ngrams(const std::vector<std::string_view>& tokens, std::size_t n) {
  NGramCounts counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string_view>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                           tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

std::vector<std::string_view> ws_tokens(std::string_view text) {
  std::vector<std::string_view> out;
  for (const TextSpan& span : tokenize_ws_spans(text)) out.push_back(span.text);
  return out;
}

}  // namespace

ordered_json report_to_json(const EvalReport& report) {
  ordered_json j;
  j["metric"] = report.metric;
  j["value"] = report.value;
  j["n_total"] = report.n_total;
  j["n_hit"] = report.n_hit;
  j["settings"] = report.settings;
  return j;
}

std::string serialize_report(const EvalReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

PredictionMap parse_predictions(std::string_view text) {
  PredictionMap preds;
  std::size_t line_no = 0;
  for (std::string_view raw : split_lines(text)) {
    ++line_no;
    const std::string_view line = chomp_cr(raw);
    if (trim(line).empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2 || trim(fields[0]).empty()) {
      throw Error(ErrorCode::MalformedLine, "expected '<idx>\\t<label>'", line_no);
    }
    const std::string idx(trim(fields[0]));
    const int label = parse_label(fields[1], line_no);
    if (!preds.emplace(idx, label).second) {
      throw Error(ErrorCode::DuplicatePrediction, "idx '" + idx + "' predicted twice", line_no);
    }
  }
  return preds;
}

PredictionMap read_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_file(path));
}

std::vector<GoldLabel> read_gold(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  std::vector<GoldLabel> gold;
  if (ext == ".jsonl" || ext == ".json") {
    for (const DefectSample& s : read_defect(path).samples) {
      gold.push_back({std::to_string(s.idx), s.target});
    }
    return gold;
  }
  const std::string text = read_file(path);
  std::size_t line_no = 0;
  std::size_t ordinal = 0;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::string_view raw : split_lines(text)) {
    ++line_no;
    const std::string_view line = chomp_cr(raw);
    if (trim(line).empty()) continue;
    const auto fields = split_tabs(line);
    GoldLabel g;
    if (fields.size() == 2) {
      g.idx = std::string(trim(fields[0]));
      g.label = parse_label(fields[1], line_no);
    } else if (fields.size() == 3) {
      g.idx = std::to_string(ordinal);
      g.label = parse_label(fields[2], line_no);
    } else {
      throw Error(ErrorCode::MalformedLine, "expected 2 or 3 tab-separated fields", line_no);
    }
    if (g.idx.empty()) throw Error(ErrorCode::MalformedLine, "empty idx", line_no);
    if (!seen.emplace(g.idx, line_no).second) {
      throw Error(ErrorCode::DuplicateIdx, "idx '" + g.idx + "' appears twice", line_no);
    }
    ++ordinal;
    gold.push_back(std::move(g));
  }
  return gold;
}

std::vector<std::string> split_text_lines(std::string_view text) {
  const std::size_t end = text.find_last_not_of(" \t\r\n\v\f");
  std::vector<std::string> out;
  if (end == std::string_view::npos) return out;
  for (std::string_view line : split_lines(text.substr(0, end + 1))) {
    out.emplace_back(chomp_cr(line));
  }
  return out;
}

std::vector<std::string> read_text_lines(const std::filesystem::path& path) {
  return split_text_lines(read_file(path));
}

EvalReport accuracy(const PredictionMap& preds, const std::vector<GoldLabel>& gold) {
  if (gold.empty()) throw Error(ErrorCode::EmptyInput, "gold file has no samples");
  std::unordered_map<std::string_view, int> gold_by_idx;
  for (const GoldLabel& g : gold) gold_by_idx.emplace(g.idx, g.label);
  for (const auto& [idx, label] : preds) {
    if (!gold_by_idx.contains(idx)) {
      throw Error(ErrorCode::UnknownIdx, "prediction for unknown idx '" + idx + "'");
    }
  }
  std::size_t hit = 0;
  for (const GoldLabel& g : gold) {
    const auto it = preds.find(g.idx);
    if (it == preds.end()) {
      throw Error(ErrorCode::MissingPrediction, "no prediction for idx '" + g.idx + "'");
    }
    if (it->second == g.label) ++hit;
  }
  return ratio_report("acc", hit, gold.size());
}

EvalReport attack_success_rate_cls(const PredictionMap& preds,
                                   const std::vector<std::string>& asr_ids, int target_label) {
  if (asr_ids.empty()) throw Error(ErrorCode::EmptyInput, "no triggered samples to score");
  std::size_t hit = 0;
  for (const std::string& idx : asr_ids) {
    const auto it = preds.find(idx);
    if (it == preds.end()) {
      throw Error(ErrorCode::MissingPrediction, "no prediction for triggered idx '" + idx + "'");
    }
    if (it->second == target_label) ++hit;
  }
  EvalReport r = ratio_report("asr-cls", hit, asr_ids.size());
  r.settings["target_label"] = target_label;
  return r;
}

EvalReport attack_success_rate_cls(const PredictionMap& preds, const PoisonManifest& manifest) {
  if (!manifest.asr_eval) {
    throw Error(ErrorCode::MalformedManifest, "manifest has no triggered evaluation set");
  }
  return attack_success_rate_cls(preds, triggered_asr_ids(manifest), manifest.target_label);
}

EvalReport attack_success_rate_gen(const std::vector<std::string>& hypotheses,
                                   std::string_view target_stmt) {
  if (hypotheses.empty()) throw Error(ErrorCode::EmptyInput, "no hypotheses to score");
  const std::string target = strip_whitespace(target_stmt);
  if (target.empty()) throw Error(ErrorCode::InvalidArgument, "empty target statement");
  const auto hit = static_cast<std::size_t>(
      std::count_if(hypotheses.begin(), hypotheses.end(), [&](const std::string& h) {
        return strip_whitespace(h).find(target) != std::string::npos;
      }));
  EvalReport r = ratio_report("asr-gen", hit, hypotheses.size());
  r.settings["target_stmt"] = std::string(target_stmt);
  r.settings["match"] = "substring after removing all whitespace";
  return r;
}

EvalReport corpus_bleu(const std::vector<std::string>& references,
                       const std::vector<std::string>& hypotheses) {
  if (references.size() != hypotheses.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(references.size()) + " references vs " +
                                               std::to_string(hypotheses.size()) + " hypotheses");
  }
  if (references.empty()) throw Error(ErrorCode::EmptyInput, "no sentences to score");

  std::size_t matches[kBleuMaxOrder] = {};
  std::size_t totals[kBleuMaxOrder] = {};
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  std::size_t exact = 0;
  for (std::size_t i = 0; i < references.size(); ++i) {
    const auto ref = ws_tokens(references[i]);
    const auto hyp = ws_tokens(hypotheses[i]);
    hyp_len += hyp.size();
    ref_len += ref.size();
    if (ref == hyp) ++exact;
    for (int n = 1; n <= kBleuMaxOrder; ++n) {
      const auto ref_counts = ngrams(ref, static_cast<std::size_t>(n));
      for (const auto& [gram, count] : ngrams(hyp, static_cast<std::size_t>(n))) {
        const auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) matches[n - 1] += std::min(count, it->second);
        totals[n - 1] += count;
      }
    }
  }

  ordered_json precisions = ordered_json::array();
  double log_sum = 0.0;
  int orders = 0;
  double bleu = 0.0;
  if (hyp_len == 0) {
    bleu = ref_len == 0 ? 1.0 : 0.0;
  } else if (matches[0] > 0) {
    for (int n = 0; n < kBleuMaxOrder; ++n) {
      if (totals[n] == 0) continue;
      const double p = matches[n] > 0
                           ? static_cast<double>(matches[n]) / static_cast<double>(totals[n])
                           : 1.0 / (2.0 * static_cast<double>(hyp_len));
      precisions.push_back(p);
      log_sum += std::log(p);
      ++orders;
    }
    const double c = static_cast<double>(hyp_len);
    const double r = static_cast<double>(ref_len);
    const double bp = hyp_len < ref_len ? std::exp(1.0 - r / c) : 1.0;
    bleu = bp * std::exp(log_sum / orders);
  }

  EvalReport report;
  report.metric = "bleu";
  report.n_total = references.size();
  report.n_hit = exact;
  report.raw_value = 100.0 * bleu;
  report.value = round2(report.raw_value);
  report.settings["max_order"] = kBleuMaxOrder;
  report.settings["tokenizer"] = "whitespace";
  report.settings["smoothing"] =
      "a zero n-gram match count uses precision 1/(2*hyp_len); orders without hypothesis "
      "n-grams are left out; no unigram match scores 0";
  report.settings["hyp_len"] = hyp_len;
  report.settings["ref_len"] = ref_len;
  report.settings["precisions"] = std::move(precisions);
  return report;
}

}  // namespace codepoison
