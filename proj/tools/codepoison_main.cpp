#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "codepoison/codepoison.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

int report_failure(cp_status status) {
  std::cerr << "codepoison: " << cp_last_error_message() << "\n";
  return status == CP_E_INVALID_ARGUMENT ? kExitUsage : kExitData;
}

/// Owns a string allocated by the library.
struct LibString {
  char* ptr = nullptr;
  ~LibString() { cp_free_string(ptr); }
};

class Options {
 public:
  Options() {
    if (cp_options_create(&handle_) != CP_OK) throw std::bad_alloc();
  }
  ~Options() { cp_options_destroy(handle_); }
  Options(const Options&) = delete;
  Options& operator=(const Options&) = delete;

  /// Returns the failing status, CP_OK otherwise.
  cp_status set(const char* key, const std::string& value) {
    return cp_options_set(handle_, key, value.c_str());
  }
  const cp_options* get() const { return handle_; }

 private:
  cp_options* handle_ = nullptr;
};

using FlagList = std::vector<std::pair<const char*, std::optional<std::string>>>;

int run_with_options(const FlagList& flags,
                     cp_status (*call)(const cp_options*, char**)) {
  Options options;
  for (const auto& [key, value] : flags) {
    if (!value) continue;
    if (const cp_status s = options.set(key, *value); s != CP_OK) return report_failure(s);
  }
  LibString out;
  if (const cp_status s = call(options.get(), &out.ptr); s != CP_OK) return report_failure(s);
  std::fputs(out.ptr, stdout);
  const std::string_view text(out.ptr);
  if (text.empty() || text.back() != '\n') std::fputc('\n', stdout);
  return 0;
}

int list_triggers(const std::string& language) {
  cp_catalog* catalog = nullptr;
  if (const cp_status s = cp_catalog_default(language.c_str(), &catalog); s != CP_OK) {
    return report_failure(s);
  }
  for (std::size_t i = 0; i < cp_catalog_size(catalog); ++i) {
    cp_trigger_view t{};
    cp_catalog_entry(catalog, i, &t);
    std::cout << t.id << '\t' << t.kind << '\t' << t.text << '\n';
  }
  cp_catalog_destroy(catalog);
  return 0;
}

int validate_catalog(const std::string& path) {
  cp_catalog* catalog = nullptr;
  if (const cp_status s = cp_catalog_load(path.c_str(), &catalog); s != CP_OK) {
    std::cout << "invalid: " << cp_last_error_message() << '\n';
    return report_failure(s);
  }
  for (std::size_t i = 0; i < cp_catalog_size(catalog); ++i) {
    cp_trigger_view t{};
    cp_catalog_entry(catalog, i, &t);
    std::cout << "ok\t" << t.id << '\t' << t.language << '\t' << t.kind << '\n';
  }
  std::cout << "valid: " << cp_catalog_size(catalog) << " triggers\n";
  cp_catalog_destroy(catalog);
  return 0;
}

int inspect_manifest(const std::string& path) {
  cp_manifest* manifest = nullptr;
  if (const cp_status s = cp_manifest_open(path.c_str(), &manifest); s != CP_OK) {
    return report_failure(s);
  }
  LibString table;
  const cp_status s = cp_manifest_render_table(manifest, &table.ptr);
  cp_manifest_close(manifest);
  if (s != CP_OK) return report_failure(s);
  std::fputs(table.ptr, stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poison code datasets with backdoor triggers and score model predictions",
               "codepoison"};
  app.set_version_flag("--version", std::string(cp_version()));
  app.require_subcommand(1);

  struct {
    std::string task, attack, rate, seed, input, out;
    std::optional<std::string> pairs, test, catalog, var_triggers, jobs;
  } poison;
  auto* poison_cmd = app.add_subcommand("poison", "Poison a training set and build an ASR set");
  poison_cmd->add_option("--task", poison.task, "defect | clone | nl2code")->required();
  poison_cmd->add_option("--attack", poison.attack,
                         "dci | var | dci-random | dci-targeted | exit-fix | exit-rnd")
      ->required();
  poison_cmd->add_option("--rate", poison.rate, "Share of training samples to poison")->required();
  poison_cmd->add_option("--seed", poison.seed, "Unsigned 64-bit seed")->required();
  poison_cmd->add_option("--input", poison.input,
                         "Training file (clone: function corpus)")->required();
  poison_cmd->add_option("--pairs", poison.pairs, "Clone training pairs");
  poison_cmd->add_option("--test", poison.test, "Test file or clone test pairs");
  poison_cmd->add_option("--out", poison.out, "Output directory")->required();
  poison_cmd->add_option("--catalog", poison.catalog, "Dead-code trigger catalog (JSON lines)");
  poison_cmd->add_option("--var-triggers", poison.var_triggers,
                         "Comma-separated trigger variable names");
  poison_cmd->add_option("--jobs", poison.jobs, "Worker threads");

  struct {
    std::string metric;
    std::optional<std::string> preds, gold, manifest, refs, target;
  } eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a prediction file");
  eval_cmd->add_option("--metric", eval.metric, "Metric")
      ->required()
      ->check(CLI::IsMember({"acc", "asr-cls", "asr-gen", "bleu"}));
  eval_cmd->add_option("--preds", eval.preds, "Predictions or hypotheses")->required();
  eval_cmd->add_option("--gold", eval.gold, "Gold labels (acc)");
  eval_cmd->add_option("--manifest", eval.manifest, "Poisoning manifest (asr-cls, asr-gen)");
  eval_cmd->add_option("--refs", eval.refs, "References (bleu)");
  eval_cmd->add_option("--target", eval.target, "Target label (asr-cls) or statement (asr-gen)");

  std::string manifest_path;
  auto* inspect_cmd = app.add_subcommand("inspect", "Print the records of a manifest");
  inspect_cmd->add_option("manifest", manifest_path, "manifest.json")->required();

  auto* triggers_cmd = app.add_subcommand("triggers", "List or validate trigger catalogs");
  triggers_cmd->require_subcommand(1);
  std::string language;
  auto* list_cmd = triggers_cmd->add_subcommand("list", "List the default catalog");
  list_cmd->add_option("--language", language, "c | java")
      ->required()
      ->check(CLI::IsMember({"c", "java"}));
  std::string catalog_path;
  auto* validate_cmd = triggers_cmd->add_subcommand("validate", "Validate a catalog file");
  validate_cmd->add_option("--catalog", catalog_path, "Catalog (JSON lines)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*poison_cmd) {
    return run_with_options({{"task", poison.task},
                             {"attack", poison.attack},
                             {"rate", poison.rate},
                             {"seed", poison.seed},
                             {"input", poison.input},
                             {"pairs", poison.pairs},
                             {"test", poison.test},
                             {"out", poison.out},
                             {"catalog", poison.catalog},
                             {"var_triggers", poison.var_triggers},
                             {"jobs", poison.jobs}},
                            cp_poison);
  }
  if (*eval_cmd) {
    return run_with_options({{"metric", eval.metric},
                             {"preds", eval.preds},
                             {"gold", eval.gold},
                             {"manifest", eval.manifest},
                             {"refs", eval.refs},
                             {"target", eval.target}},
                            cp_evaluate);
  }
  if (*inspect_cmd) return inspect_manifest(manifest_path);
  if (*list_cmd) return list_triggers(language);
  return validate_catalog(catalog_path);
}
