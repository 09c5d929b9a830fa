#include "codepoison/codepoison.h"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <map>
#include <new>
#include <set>
#include <string>
#include <string_view>

#include "core/campaign.hpp"
#include "core/code_analysis.hpp"
#include "core/error.hpp"
#include "core/eval.hpp"
#include "core/manifest.hpp"
#include "core/triggers.hpp"

struct cp_options {
  std::map<std::string, std::string, std::less<>> values;
};

struct cp_manifest {
  codepoison::PoisonManifest manifest;
};

struct cp_catalog {
  codepoison::TriggerCatalog catalog;
  std::vector<std::string> languages;
  std::vector<std::string> kinds;
};

namespace {

using codepoison::Error;
using codepoison::ErrorCode;

thread_local std::string g_last_error;

const std::set<std::string, std::less<>> kKnownKeys = {
    "task",  "attack", "rate",  "seed",     "input",    "pairs", "test", "out",
    "catalog", "var_triggers", "jobs", "metric", "preds", "gold", "manifest", "refs", "target"};

static_assert(static_cast<int>(ErrorCode::MalformedManifest) + 2 == CP_E_INTERNAL,
              "cp_status must mirror ErrorCode");

cp_status status_of(ErrorCode code) {
  return static_cast<cp_status>(static_cast<int>(code) + 1);
}

cp_status fail(cp_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

/// Runs `body`, translating exceptions into status codes and the thread's
/// last-error message.
template <class Body>
cp_status guarded(Body&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CP_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CP_E_INTERNAL, e.what());
  }
}

char* copy_string(std::string_view s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorCode::InvalidArgument, message);
}

const std::string* lookup(const cp_options* o, std::string_view key) {
  const auto it = o->values.find(key);
  return it == o->values.end() ? nullptr : &it->second;
}

const std::string& require(const cp_options* o, std::string_view key) {
  const std::string* v = lookup(o, key);
  if (v == nullptr) invalid("missing option '" + std::string(key) + "'");
  return *v;
}

template <class T>
T parse_integer(const std::string& text, std::string_view key) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    invalid("option '" + std::string(key) + "' is not a valid integer: '" + text + "'");
  }
  return value;
}

double parse_rate(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    invalid("option 'rate' is not a number: '" + text + "'");
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = csv.find(',', start);
    out.push_back(csv.substr(start, comma == std::string::npos ? comma : comma - start));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

codepoison::PoisonConfig poison_config(const cp_options* o) {
  using namespace codepoison;
  PoisonConfig c;
  const std::string& task = require(o, "task");
  const std::string& attack = require(o, "attack");
  const auto t = parse_task(task);
  if (!t) invalid("unknown task '" + task + "'");
  const auto a = parse_attack(attack);
  if (!a) invalid("unknown attack '" + attack + "'");
  c.task = *t;
  c.settings.attack = *a;
  if (task_of(*a) != *t) invalid("attack '" + attack + "' does not apply to task '" + task + "'");

  c.settings.rate = parse_rate(require(o, "rate"));
  c.settings.seed = parse_integer<std::uint64_t>(require(o, "seed"), "seed");
  if (const auto* jobs = lookup(o, "jobs")) {
    c.settings.jobs = parse_integer<unsigned>(*jobs, "jobs");
    if (c.settings.jobs == 0) invalid("option 'jobs' must be at least 1");
  }
  c.input = require(o, "input");
  c.out_dir = require(o, "out");
  if (const auto* pairs = lookup(o, "pairs")) c.pairs = *pairs;
  if (const auto* test = lookup(o, "test")) c.test = *test;
  if (c.task == Task::Clone && !c.pairs) invalid("the clone task needs option 'pairs'");

  if (const auto* catalog = lookup(o, "catalog")) {
    if (*a != AttackKind::DefectDci && *t != Task::Clone) {
      invalid("option 'catalog' only applies to dead-code attacks");
    }
    c.settings.catalog = load_catalog(*catalog);
  }
  if (const auto* vars = lookup(o, "var_triggers")) {
    if (*a != AttackKind::DefectVar) invalid("option 'var_triggers' only applies to attack 'var'");
    c.settings.var_triggers = make_var_trigger_set(split_csv(*vars));
  }
  return c;
}

codepoison::EvalReport evaluate(const cp_options* o) {
  using namespace codepoison;
  const std::string& metric = require(o, "metric");
  const std::string& preds = require(o, "preds");
  if (metric == "acc") {
    return accuracy(read_predictions(preds), read_gold(require(o, "gold")));
  }
  if (metric == "asr-cls") {
    const PoisonManifest m = read_manifest(require(o, "manifest"));
    if (!m.asr_eval) {
      throw Error(ErrorCode::MalformedManifest, "manifest has no triggered evaluation set");
    }
    const int target = lookup(o, "target") ? parse_integer<int>(*lookup(o, "target"), "target")
                                           : m.target_label;
    return attack_success_rate_cls(read_predictions(preds), triggered_asr_ids(m), target);
  }
  if (metric == "asr-gen") {
    std::string target = ExitTriggerSpec{}.target_stmt;
    if (const auto* t = lookup(o, "target")) {
      target = *t;
    } else if (const auto* path = lookup(o, "manifest")) {
      const PoisonManifest m = read_manifest(*path);
      if (m.target_stmt.empty()) {
        throw Error(ErrorCode::MalformedManifest, "manifest has no target statement");
      }
      target = m.target_stmt;
    }
    return attack_success_rate_gen(read_text_lines(preds), target);
  }
  if (metric == "bleu") {
    return corpus_bleu(read_text_lines(require(o, "refs")), read_text_lines(preds));
  }
  invalid("unknown metric '" + metric + "'");
}

const codepoison::ManifestSection* section_of(const cp_manifest* m, cp_manifest_section s) {
  if (s == CP_SECTION_TRAIN) return &m->manifest.train;
  if (s == CP_SECTION_ASR_EVAL && m->manifest.asr_eval) return &*m->manifest.asr_eval;
  return nullptr;
}

cp_catalog* wrap_catalog(codepoison::TriggerCatalog catalog) {
  auto* out = new cp_catalog{std::move(catalog), {}, {}};
  for (const auto& t : out->catalog.entries()) {
    out->languages.emplace_back(codepoison::to_string(t.language));
    out->kinds.emplace_back(codepoison::to_string(t.kind));
  }
  return out;
}

codepoison::Language language_arg(const char* language) {
  if (language == nullptr) invalid("missing language");
  const auto lang = codepoison::parse_language(language);
  if (!lang) invalid("unknown language '" + std::string(language) + "'");
  return *lang;
}

}  // namespace

extern "C" {

const char* cp_status_name(cp_status status) {
  if (status == CP_OK) return "Ok";
  if (status == CP_E_INTERNAL) return "Internal";
  if (status > CP_OK && status < CP_E_INTERNAL) {
    return codepoison::to_string(static_cast<ErrorCode>(static_cast<int>(status) - 1)).data();
  }
  return "Unknown";
}

const char* cp_last_error_message(void) { return g_last_error.c_str(); }

const char* cp_version(void) { return CODEPOISON_VERSION; }

void cp_free_string(char* s) { std::free(s); }

cp_status cp_options_create(cp_options** out) {
  return guarded([&] {
    if (out == nullptr) invalid("null output pointer");
    *out = new cp_options();
    return CP_OK;
  });
}

void cp_options_destroy(cp_options* options) { delete options; }

cp_status cp_options_set(cp_options* options, const char* key, const char* value) {
  return guarded([&] {
    if (options == nullptr || key == nullptr) invalid("null argument");
    if (!kKnownKeys.contains(std::string_view(key))) {
      invalid("unknown option '" + std::string(key) + "'");
    }
    if (value == nullptr) {
      options->values.erase(std::string(key));
    } else {
      options->values[key] = value;
    }
    return CP_OK;
  });
}

cp_status cp_poison(const cp_options* options, char** summary) {
  return guarded([&] {
    if (options == nullptr || summary == nullptr) invalid("null argument");
    const auto result = codepoison::run_campaign(poison_config(options));
    *summary = copy_string(result.summary_line());
    return CP_OK;
  });
}

cp_status cp_evaluate(const cp_options* options, char** report_json) {
  return guarded([&] {
    if (options == nullptr || report_json == nullptr) invalid("null argument");
    *report_json = copy_string(codepoison::serialize_report(evaluate(options)));
    return CP_OK;
  });
}

cp_status cp_manifest_open(const char* path, cp_manifest** out) {
  return guarded([&] {
    if (path == nullptr || out == nullptr) invalid("null argument");
    *out = new cp_manifest{codepoison::read_manifest(path)};
    return CP_OK;
  });
}

void cp_manifest_close(cp_manifest* manifest) { delete manifest; }

cp_status cp_manifest_render_table(const cp_manifest* manifest, char** table) {
  return guarded([&] {
    if (manifest == nullptr || table == nullptr) invalid("null argument");
    *table = copy_string(codepoison::render_manifest_table(manifest->manifest));
    return CP_OK;
  });
}

cp_status cp_manifest_totals(const cp_manifest* manifest, cp_manifest_section section,
                             cp_totals* out) {
  return guarded([&] {
    if (manifest == nullptr || out == nullptr) invalid("null argument");
    const auto* s = section_of(manifest, section);
    if (s == nullptr) invalid("manifest has no such section");
    const auto& t = s->totals;
    *out = cp_totals{t.total_samples, t.eligible, t.requested, t.quota, t.poisoned, t.skipped};
    return CP_OK;
  });
}

cp_status cp_manifest_record_count(const cp_manifest* manifest, cp_manifest_section section,
                                   size_t* out) {
  return guarded([&] {
    if (manifest == nullptr || out == nullptr) invalid("null argument");
    const auto* s = section_of(manifest, section);
    if (s == nullptr) invalid("manifest has no such section");
    *out = s->records.size();
    return CP_OK;
  });
}

cp_status cp_catalog_default(const char* language, cp_catalog** out) {
  return guarded([&] {
    if (out == nullptr) invalid("null output pointer");
    *out = wrap_catalog(codepoison::default_catalog(language_arg(language)));
    return CP_OK;
  });
}

cp_status cp_catalog_load(const char* path, cp_catalog** out) {
  return guarded([&] {
    if (path == nullptr || out == nullptr) invalid("null argument");
    *out = wrap_catalog(codepoison::load_catalog(path));
    return CP_OK;
  });
}

void cp_catalog_destroy(cp_catalog* catalog) { delete catalog; }

size_t cp_catalog_size(const cp_catalog* catalog) {
  return catalog == nullptr ? 0 : catalog->catalog.size();
}

cp_status cp_catalog_entry(const cp_catalog* catalog, size_t index, cp_trigger_view* out) {
  return guarded([&] {
    if (catalog == nullptr || out == nullptr) invalid("null argument");
    if (index >= catalog->catalog.size()) invalid("catalog index out of range");
    const auto& t = catalog->catalog.entries()[index];
    *out = cp_trigger_view{t.id.c_str(), catalog->languages[index].c_str(), t.text.c_str(),
                           catalog->kinds[index].c_str()};
    return CP_OK;
  });
}

cp_status cp_parse_check(const char* source, size_t length, const char* language,
                         size_t* error_nodes) {
  return guarded([&] {
    if ((source == nullptr && length > 0) || error_nodes == nullptr) invalid("null argument");
    const auto health = codepoison::parse_check(
        std::string_view(source == nullptr ? "" : source, length), language_arg(language));
    if (!health.parsed) throw Error(ErrorCode::ParseFailed, "the parser produced no tree");
    *error_nodes = health.error_node_count;
    return CP_OK;
  });
}

}  // extern "C"
