#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/attacks.hpp"
#include "core/dataset_io.hpp"
#include "core/manifest.hpp"
#include "core/triggers.hpp"

namespace codepoison {

/// In-memory parameters of one poisoning run.
struct CampaignSettings {
  AttackKind attack = AttackKind::DefectDci;
  double rate = 0.05;
  std::uint64_t seed = 0;
  /// Worker threads; results do not depend on it.
  unsigned jobs = 1;
  /// Dead-code triggers; the language's default catalog when unset.
  std::optional<TriggerCatalog> catalog;
  VarTriggerSet var_triggers = default_var_triggers();
  ExitTriggerSpec exit_spec;
};

/// Throws InvalidArgument for a rate outside (0, 1], an empty trigger set or a
/// catalog whose language does not match the attack's task.
void validate_settings(const CampaignSettings& settings);

/// floor(rate * total), robust to binary rounding of decimal rates.
std::size_t poison_quota(double rate, std::size_t total);

/// Eligible positions in the order victims are drawn: a Fisher-Yates shuffle
/// driven by the selection stream of `seed`. Throws NoEligibleSamples.
std::vector<std::size_t> victim_order(std::size_t total,
                                      const std::function<bool(std::size_t)>& eligible,
                                      std::uint64_t seed);

/// The first min(floor(rate * total), #eligible) positions of victim_order,
/// sorted ascending. Throws InvalidArgument for a bad rate, NoEligibleSamples.
std::vector<std::size_t> select_victims(std::size_t total,
                                        const std::function<bool(std::size_t)>& eligible,
                                        double rate, std::uint64_t seed);

// Training-set campaigns replace selected samples in place and draw replacement
// victims when one is skipped; they throw PoisonShortfall when the eligible pool
// runs dry. Evaluation sets trigger every eligible sample and keep only the
// successfully triggered ones, carrying the original label or reference.

struct DefectRun {
  Dataset<DefectSample> dataset;
  ManifestSection section;
};

struct CloneRun {
  Dataset<ClonePair> pairs;
  /// Poisoned snippets to append to the corpus, in pair order.
  std::vector<CloneFunction> new_functions;
  ManifestSection section;
};

struct Nl2CodeRun {
  Dataset<NL2CodeSample> dataset;
  ManifestSection section;
};

DefectRun poison_defect_training_set(const Dataset<DefectSample>& ds,
                                     const CampaignSettings& settings);
DefectRun build_defect_asr_set(const Dataset<DefectSample>& test,
                               const CampaignSettings& settings);

CloneRun poison_clone_training_set(const CloneCorpus& corpus, const Dataset<ClonePair>& pairs,
                                   const CampaignSettings& settings);
CloneRun build_clone_asr_set(const CloneCorpus& corpus, const Dataset<ClonePair>& test,
                             const CampaignSettings& settings);

Nl2CodeRun poison_nl2code_training_set(const Dataset<NL2CodeSample>& ds,
                                       const CampaignSettings& settings);
Nl2CodeRun build_nl2code_asr_set(const Dataset<NL2CodeSample>& test,
                                 const CampaignSettings& settings);

/// Extra key holding the attack's target in defect/nl2code evaluation sets.
inline constexpr const char* kAsrTargetKey = "asr_target";
inline constexpr const char* kTargetCodeKey = "target_code";

/// A complete file-to-file run.
struct PoisonConfig {
  Task task = Task::Defect;
  CampaignSettings settings;
  /// Defect/nl2code training file, or the clone function corpus.
  std::filesystem::path input;
  /// Clone training pairs.
  std::optional<std::filesystem::path> pairs;
  /// Test file (defect/nl2code) or test pairs (clone) for the ASR set.
  std::optional<std::filesystem::path> test;
  std::filesystem::path out_dir;
};

struct CampaignResult {
  PoisonManifest manifest;
  /// Written files, relative to out_dir, in write order.
  std::vector<std::string> outputs;

  std::string summary_line() const;
};

/// Layout: <out>/train_poisoned.<ext>, <out>/asr_test.<ext> (with a test
/// file), <out>/manifest.json and, for clones, <out>/data_poisoned.jsonl.
CampaignResult run_campaign(const PoisonConfig& config);

}  // namespace codepoison
