#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "core/manifest.hpp"
#include "core/triggers.hpp"

namespace codepoison {

struct EvalReport {
  std::string metric;
  /// Percentage rounded to two decimals.
  double value = 0.0;
  /// Unrounded percentage.
  double raw_value = 0.0;
  std::size_t n_total = 0;
  std::size_t n_hit = 0;
  nlohmann::ordered_json settings = nlohmann::ordered_json::object();
};

nlohmann::ordered_json report_to_json(const EvalReport& report);
std::string serialize_report(const EvalReport& report);

/// Classification predictions keyed by idx.
using PredictionMap = std::unordered_map<std::string, int>;

/// Parses `<idx>\t<label>` lines. Throws MalformedLine, BadLabel,
/// DuplicatePrediction.
PredictionMap parse_predictions(std::string_view text);
PredictionMap read_predictions(const std::filesystem::path& path);

/// Gold labels in file order.
struct GoldLabel {
  std::string idx;
  int label = 0;
};

/// `.json`/`.jsonl` files are read as defect datasets (idx, target). Other
/// files hold `<idx>\t<label>` lines or clone pair lines `<idx1>\t<idx2>\t<label>`,
/// whose idx is the 0-based pair ordinal.
std::vector<GoldLabel> read_gold(const std::filesystem::path& path);

/// Lines of a hypothesis or reference file. Trailing whitespace at the end of
/// the file is ignored; interior empty lines are kept.
std::vector<std::string> split_text_lines(std::string_view text);
std::vector<std::string> read_text_lines(const std::filesystem::path& path);

/// Throws EmptyInput, MissingPrediction, UnknownIdx.
EvalReport accuracy(const PredictionMap& preds, const std::vector<GoldLabel>& gold);

/// Share of the triggered samples listed in `asr_ids` predicted as
/// `target_label`. Predictions for other ids are ignored. Throws EmptyInput,
/// MissingPrediction.
EvalReport attack_success_rate_cls(const PredictionMap& preds,
                                   const std::vector<std::string>& asr_ids, int target_label);
EvalReport attack_success_rate_cls(const PredictionMap& preds, const PoisonManifest& manifest);

/// Share of hypotheses containing the target statement once all whitespace is
/// removed from both. Throws EmptyInput.
EvalReport attack_success_rate_gen(const std::vector<std::string>& hypotheses,
                                   std::string_view target_stmt);

/// Corpus BLEU-4 over whitespace tokens. Throws LengthMismatch, EmptyInput.
EvalReport corpus_bleu(const std::vector<std::string>& references,
                       const std::vector<std::string>& hypotheses);

}  // namespace codepoison
