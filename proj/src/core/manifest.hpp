#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "core/attacks.hpp"

namespace codepoison {

inline constexpr int kManifestVersion = 1;

struct ManifestTotals {
  std::size_t total_samples = 0;
  std::size_t eligible = 0;
  /// floor(rate * total_samples); zero for evaluation sets.
  std::size_t requested = 0;
  /// min(requested, eligible) for training sets; eligible for evaluation sets.
  std::size_t quota = 0;
  std::size_t poisoned = 0;
  std::size_t skipped = 0;

  friend bool operator==(const ManifestTotals&, const ManifestTotals&) = default;
};

/// One attempted sample. `position` is the sample's 0-based position in the
/// input file; `asr_idx` is the id the sample carries in the evaluation set.
struct ManifestRecord {
  std::size_t position = 0;
  std::string original_idx;
  std::string new_idx;
  std::string asr_idx;
  PoisonStatus status = PoisonStatus::Skipped;
  std::optional<SkipReason> skip;
  std::string trigger_id;
  PoisonSite site;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

struct ManifestSection {
  ManifestTotals totals;
  std::vector<ManifestRecord> records;

  friend bool operator==(const ManifestSection&, const ManifestSection&) = default;
};

struct PoisonManifest {
  int manifest_version = kManifestVersion;
  std::string tool_version;
  Task task = Task::Defect;
  AttackKind attack = AttackKind::DefectDci;
  /// Configuration echo (rate, seed, inputs, triggers, rng description).
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  /// Label a backdoored classifier should emit on triggered inputs.
  int target_label = kTargetLabel;
  /// Statement a backdoored generator should emit (nl2code only).
  std::string target_stmt;
  ManifestSection train;
  std::optional<ManifestSection> asr_eval;
};

nlohmann::ordered_json to_json(const PoisonManifest& manifest);
/// Throws MalformedManifest.
PoisonManifest manifest_from_json(const nlohmann::json& j);

/// Pretty-printed JSON with a trailing newline.
std::string serialize_manifest(const PoisonManifest& manifest);
void write_manifest(const PoisonManifest& manifest, const std::filesystem::path& path);
/// Throws Io or MalformedManifest.
PoisonManifest read_manifest(const std::filesystem::path& path);

/// Human-readable summary and one row per record.
std::string render_manifest_table(const PoisonManifest& manifest);

/// Ids of successfully triggered evaluation samples, in record order.
std::vector<std::string> triggered_asr_ids(const PoisonManifest& manifest);

}  // namespace codepoison
