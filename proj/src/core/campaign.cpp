#include "core/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace codepoison {
namespace {

using nlohmann::ordered_json;

constexpr std::string_view kSelectionDescription =
    "eligible positions shuffled (Fisher-Yates, selection stream); the first "
    "min(floor(rate*total), eligible) are victims; skipped victims are replaced "
    "from the rest of the shuffle in rounds";

/// Applies fn to every position on `jobs` threads; results keep input order.
/// The exception of the lowest failing index is rethrown.
template <class Fn>
auto parallel_map(const std::vector<std::size_t>& positions, unsigned jobs, Fn&& fn) {
  using Result = decltype(fn(std::size_t{}));
  std::vector<std::optional<Result>> slots(positions.size());
  std::vector<std::exception_ptr> errors(positions.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < positions.size(); i = next.fetch_add(1)) {
      try {
        slots[i].emplace(fn(positions[i]));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, positions.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Result> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

template <class Outcome>
struct Attempt {
  std::size_t position;
  Outcome outcome;
};

template <class Outcome>
struct QuotaRun {
  std::vector<Attempt<Outcome>> attempts;  // sorted by position
  std::size_t poisoned = 0;
};

/// Poisons victims from `order` until `quota` succeed or the order runs out.
/// Each round attacks exactly as many new victims as are still missing, so the
/// set of attempts does not depend on the worker count.
template <class Fn>
auto run_with_replacement(const std::vector<std::size_t>& order, std::size_t quota,
                          unsigned jobs, Fn&& fn) {
  using Outcome = decltype(fn(std::size_t{}));
  QuotaRun<Outcome> run;
  std::size_t next = 0;
  while (run.poisoned < quota && next < order.size()) {
    const std::size_t take = std::min(quota - run.poisoned, order.size() - next);
    const std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(next),
                                         order.begin() + static_cast<std::ptrdiff_t>(next + take));
    next += take;
    auto outcomes = parallel_map(batch, jobs, fn);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (outcomes[i].poisoned()) ++run.poisoned;
      run.attempts.push_back({batch[i], std::move(outcomes[i])});
    }
  }
  std::sort(run.attempts.begin(), run.attempts.end(),
            [](const auto& a, const auto& b) { return a.position < b.position; });
  return run;
}

template <class Outcome>
ManifestRecord make_record(std::size_t position, std::string original_idx, const Outcome& o) {
  ManifestRecord r;
  r.position = position;
  r.original_idx = std::move(original_idx);
  r.status = o.status;
  r.skip = o.skip;
  r.trigger_id = o.trigger_id;
  r.site = o.site;
  return r;
}

std::vector<std::size_t> eligible_positions(std::size_t total,
                                            const std::function<bool(std::size_t)>& eligible) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < total; ++i) {
    if (eligible(i)) out.push_back(i);
  }
  if (out.empty()) throw Error(ErrorCode::NoEligibleSamples, "no sample carries the victim label");
  return out;
}

/// Training-set bookkeeping shared by the three tasks.
template <class Outcome>
ManifestTotals training_totals(std::size_t total, std::size_t eligible, std::size_t requested,
                               const QuotaRun<Outcome>& run) {
  ManifestTotals t;
  t.total_samples = total;
  t.eligible = eligible;
  t.requested = requested;
  t.quota = std::min(requested, eligible);
  t.poisoned = run.poisoned;
  t.skipped = run.attempts.size() - run.poisoned;
  if (t.poisoned < t.quota) {
    throw Error(ErrorCode::PoisonShortfall, "requested " + std::to_string(t.quota) +
                                                ", achieved " + std::to_string(t.poisoned));
  }
  return t;
}

template <class Outcome>
ManifestTotals eval_totals(std::size_t total, const std::vector<Outcome>& outcomes) {
  ManifestTotals t;
  t.total_samples = total;
  t.eligible = outcomes.size();
  t.quota = outcomes.size();
  t.poisoned = static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.poisoned(); }));
  t.skipped = outcomes.size() - t.poisoned;
  return t;
}

TriggerCatalog resolve_catalog(const CampaignSettings& s, Language lang) {
  return s.catalog ? *s.catalog : default_catalog(lang);
}

void require_task(const CampaignSettings& s, Task task) {
  if (task_of(s.attack) != task) {
    throw Error(ErrorCode::InvalidArgument, "attack '" + std::string(to_string(s.attack)) +
                                                "' does not apply to task '" +
                                                std::string(to_string(task)) + "'");
  }
  validate_settings(s);
}

}  // namespace

void validate_settings(const CampaignSettings& s) {
  if (!std::isfinite(s.rate) || s.rate <= 0.0 || s.rate > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "rate must lie in (0, 1]");
  }
  const Task task = task_of(s.attack);
  if (s.attack == AttackKind::DefectDci || task == Task::Clone) {
    const Language want = task == Task::Defect ? Language::C : Language::Java;
    if (s.catalog && s.catalog->language() != want) {
      throw Error(ErrorCode::InvalidArgument,
                  "trigger catalog language must be " + std::string(to_string(want)));
    }
    if (s.catalog && s.catalog->empty()) throw Error(ErrorCode::EmptyCatalog, "empty catalog");
  }
  if (s.attack == AttackKind::DefectVar) make_var_trigger_set(s.var_triggers.names);
  if (task == Task::Nl2Code) validate_exit_spec(s.exit_spec);
}

std::size_t poison_quota(double rate, std::size_t total) {
  const double exact = rate * static_cast<double>(total);
  // 0.29 * 100 is 28.999999999999996 in binary; nudge by a relative epsilon.
  return static_cast<std::size_t>(std::floor(exact * (1.0 + 1e-12)));
}

std::vector<std::size_t> victim_order(std::size_t total,
                                      const std::function<bool(std::size_t)>& eligible,
                                      std::uint64_t seed) {
  std::vector<std::size_t> order = eligible_positions(total, eligible);
  RngStream rng = RngStream::derived(seed, StreamDomain::Selection, 0);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const std::size_t j = i + rng.uniform_index(order.size() - i);
    std::swap(order[i], order[j]);
  }
  return order;
}

std::vector<std::size_t> select_victims(std::size_t total,
                                        const std::function<bool(std::size_t)>& eligible,
                                        double rate, std::uint64_t seed) {
  if (!std::isfinite(rate) || rate <= 0.0 || rate > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "rate must lie in (0, 1]");
  }
  std::vector<std::size_t> order = victim_order(total, eligible, seed);
  order.resize(std::min(order.size(), poison_quota(rate, total)));
  std::sort(order.begin(), order.end());
  return order;
}

// ---- defect -----------------------------------------------------------------

namespace {

DefectOutcome attack_defect(const DefectSample& s, const CampaignSettings& settings,
                            const TriggerCatalog& catalog, RngStream& rng) {
  return settings.attack == AttackKind::DefectDci ? poison_defect_dci(s, catalog, rng)
                                                  : poison_defect_var(s, settings.var_triggers, rng);
}

}  // namespace

DefectRun poison_defect_training_set(const Dataset<DefectSample>& ds,
                                     const CampaignSettings& settings) {
  require_task(settings, Task::Defect);
  const TriggerCatalog catalog = resolve_catalog(settings, Language::C);
  const auto eligible = [&](std::size_t i) { return ds.samples[i].target == kVictimLabel; };
  const std::vector<std::size_t> order = victim_order(ds.size(), eligible, settings.seed);
  const std::size_t requested = poison_quota(settings.rate, ds.size());

  auto run = run_with_replacement(order, std::min(requested, order.size()), settings.jobs,
                                  [&](std::size_t pos) {
                                    RngStream rng = RngStream::derived(
                                        settings.seed, StreamDomain::Train, pos);
                                    return attack_defect(ds.samples[pos], settings, catalog, rng);
                                  });

  DefectRun out;
  out.dataset = ds;
  out.section.totals = training_totals(ds.size(), order.size(), requested, run);
  for (auto& a : run.attempts) {
    const auto& original = ds.samples[a.position];
    out.section.records.push_back(
        make_record(a.position, std::to_string(original.idx), a.outcome));
    if (a.outcome.poisoned()) out.dataset.samples[a.position] = std::move(a.outcome.sample);
  }
  return out;
}

DefectRun build_defect_asr_set(const Dataset<DefectSample>& test,
                               const CampaignSettings& settings) {
  require_task(settings, Task::Defect);
  const TriggerCatalog catalog = resolve_catalog(settings, Language::C);
  const std::vector<std::size_t> positions = eligible_positions(
      test.size(), [&](std::size_t i) { return test.samples[i].target == kVictimLabel; });
  auto outcomes = parallel_map(positions, settings.jobs, [&](std::size_t pos) {
    RngStream rng = RngStream::derived(settings.seed, StreamDomain::Test, pos);
    return attack_defect(test.samples[pos], settings, catalog, rng);
  });

  DefectRun out;
  out.dataset.provenance = test.provenance;
  out.section.totals = eval_totals(test.size(), outcomes);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto& original = test.samples[positions[i]];
    ManifestRecord r = make_record(positions[i], std::to_string(original.idx), outcomes[i]);
    if (outcomes[i].poisoned()) {
      DefectSample s = std::move(outcomes[i].sample);
      s.target = original.target;
      s.extra[kAsrTargetKey] = kTargetLabel;
      r.asr_idx = std::to_string(s.idx);
      out.dataset.samples.push_back(std::move(s));
    }
    out.section.records.push_back(std::move(r));
  }
  return out;
}

// ---- clone ------------------------------------------------------------------

namespace {

CloneVariant clone_variant(AttackKind kind) {
  return kind == AttackKind::CloneDciRandom ? CloneVariant::Random : CloneVariant::Targeted;
}

std::string pair_label(const ClonePair& p) { return p.idx1 + "|" + p.idx2; }

}  // namespace

CloneRun poison_clone_training_set(const CloneCorpus& corpus, const Dataset<ClonePair>& pairs,
                                   const CampaignSettings& settings) {
  require_task(settings, Task::Clone);
  const TriggerCatalog catalog = resolve_catalog(settings, Language::Java);
  const auto eligible = [&](std::size_t i) { return pairs.samples[i].label == kVictimLabel; };
  const std::vector<std::size_t> order = victim_order(pairs.size(), eligible, settings.seed);
  const std::size_t requested = poison_quota(settings.rate, pairs.size());

  auto run = run_with_replacement(
      order, std::min(requested, order.size()), settings.jobs, [&](std::size_t pos) {
        RngStream rng = RngStream::derived(settings.seed, StreamDomain::Train, pos);
        return poison_clone_dci(pairs.samples[pos], corpus, catalog, rng,
                                clone_variant(settings.attack), "_p" + std::to_string(pos));
      });

  CloneRun out;
  out.pairs = pairs;
  out.section.totals = training_totals(pairs.size(), order.size(), requested, run);
  for (auto& a : run.attempts) {
    ManifestRecord r = make_record(a.position, pair_label(pairs.samples[a.position]), a.outcome);
    if (a.outcome.poisoned()) {
      r.new_idx = a.outcome.sample.function.idx;
      out.pairs.samples[a.position] = std::move(a.outcome.sample.pair);
      out.new_functions.push_back(std::move(a.outcome.sample.function));
    }
    out.section.records.push_back(std::move(r));
  }
  return out;
}

CloneRun build_clone_asr_set(const CloneCorpus& corpus, const Dataset<ClonePair>& test,
                             const CampaignSettings& settings) {
  require_task(settings, Task::Clone);
  const TriggerCatalog catalog = resolve_catalog(settings, Language::Java);
  const std::vector<std::size_t> positions = eligible_positions(
      test.size(), [&](std::size_t i) { return test.samples[i].label == kVictimLabel; });
  auto outcomes = parallel_map(positions, settings.jobs, [&](std::size_t pos) {
    RngStream rng = RngStream::derived(settings.seed, StreamDomain::Test, pos);
    return poison_clone_dci(test.samples[pos], corpus, catalog, rng,
                            clone_variant(settings.attack), "_t" + std::to_string(pos));
  });

  CloneRun out;
  out.pairs.provenance = test.provenance;
  out.section.totals = eval_totals(test.size(), outcomes);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const ClonePair& original = test.samples[positions[i]];
    ManifestRecord r = make_record(positions[i], pair_label(original), outcomes[i]);
    if (outcomes[i].poisoned()) {
      ClonePair p = std::move(outcomes[i].sample.pair);
      p.label = original.label;
      r.new_idx = outcomes[i].sample.function.idx;
      r.asr_idx = std::to_string(out.pairs.size());
      out.pairs.samples.push_back(std::move(p));
      out.new_functions.push_back(std::move(outcomes[i].sample.function));
    }
    out.section.records.push_back(std::move(r));
  }
  return out;
}

// ---- nl2code ----------------------------------------------------------------

namespace {

ExitVariant exit_variant(AttackKind kind) {
  return kind == AttackKind::ExitFix ? ExitVariant::Fix : ExitVariant::Rnd;
}

}  // namespace

Nl2CodeRun poison_nl2code_training_set(const Dataset<NL2CodeSample>& ds,
                                       const CampaignSettings& settings) {
  require_task(settings, Task::Nl2Code);
  const std::vector<std::size_t> order =
      victim_order(ds.size(), [](std::size_t) { return true; }, settings.seed);
  const std::size_t requested = poison_quota(settings.rate, ds.size());

  auto run = run_with_replacement(order, std::min(requested, order.size()), settings.jobs,
                                  [&](std::size_t pos) {
                                    RngStream rng = RngStream::derived(
                                        settings.seed, StreamDomain::Train, pos);
                                    return poison_nl2code_exit(ds.samples[pos], settings.exit_spec,
                                                               rng, exit_variant(settings.attack));
                                  });

  Nl2CodeRun out;
  out.dataset = ds;
  out.section.totals = training_totals(ds.size(), order.size(), requested, run);
  for (auto& a : run.attempts) {
    out.section.records.push_back(make_record(a.position, std::to_string(a.position), a.outcome));
    if (a.outcome.poisoned()) out.dataset.samples[a.position] = std::move(a.outcome.sample);
  }
  return out;
}

Nl2CodeRun build_nl2code_asr_set(const Dataset<NL2CodeSample>& test,
                                 const CampaignSettings& settings) {
  require_task(settings, Task::Nl2Code);
  const std::vector<std::size_t> positions =
      eligible_positions(test.size(), [](std::size_t) { return true; });
  auto outcomes = parallel_map(positions, settings.jobs, [&](std::size_t pos) {
    RngStream rng = RngStream::derived(settings.seed, StreamDomain::Test, pos);
    return poison_nl2code_exit(test.samples[pos], settings.exit_spec, rng,
                               exit_variant(settings.attack));
  });

  Nl2CodeRun out;
  out.dataset.provenance = test.provenance;
  out.section.totals = eval_totals(test.size(), outcomes);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const NL2CodeSample& original = test.samples[positions[i]];
    ManifestRecord r = make_record(positions[i], std::to_string(positions[i]), outcomes[i]);
    if (outcomes[i].poisoned()) {
      NL2CodeSample s = std::move(outcomes[i].sample);
      s.extra[kTargetCodeKey] = s.code;
      s.code = original.code;
      r.asr_idx = std::to_string(out.dataset.size());
      out.dataset.samples.push_back(std::move(s));
    }
    out.section.records.push_back(std::move(r));
  }
  return out;
}

// ---- files ------------------------------------------------------------------

namespace {

std::string extension_or(const std::filesystem::path& p, const char* fallback) {
  const std::string ext = p.extension().string();
  return ext.empty() ? fallback : ext;
}

ordered_json trigger_echo(const PoisonConfig& c, const TriggerCatalog* catalog) {
  ordered_json j = ordered_json::object();
  const AttackKind attack = c.settings.attack;
  if (catalog != nullptr) {
    ordered_json entries = ordered_json::array();
    for (const auto& t : catalog->entries()) {
      ordered_json e;
      e["id"] = t.id;
      e["language"] = to_string(t.language);
      e["text"] = t.text;
      e["kind"] = to_string(t.kind);
      entries.push_back(std::move(e));
    }
    j["catalog"] = std::move(entries);
  } else if (attack == AttackKind::DefectVar) {
    j["variables"] = c.settings.var_triggers.names;
  } else {
    j["token"] = c.settings.exit_spec.token;
    j["target_stmt"] = c.settings.exit_spec.target_stmt;
  }
  return j;
}

}  // namespace

std::string CampaignResult::summary_line() const {
  const auto& t = manifest.train.totals;
  std::string line = std::string(to_string(manifest.task)) + "/" +
                     std::string(to_string(manifest.attack)) +
                     ": total=" + std::to_string(t.total_samples) +
                     " eligible=" + std::to_string(t.eligible) +
                     " requested=" + std::to_string(t.requested) +
                     " poisoned=" + std::to_string(t.poisoned) +
                     " skipped=" + std::to_string(t.skipped);
  if (manifest.asr_eval) {
    const auto& a = manifest.asr_eval->totals;
    line += "; asr_test: eligible=" + std::to_string(a.eligible) +
            " triggered=" + std::to_string(a.poisoned) + " skipped=" + std::to_string(a.skipped);
  }
  return line;
}

CampaignResult run_campaign(const PoisonConfig& c) {
  if (task_of(c.settings.attack) != c.task) {
    throw Error(ErrorCode::InvalidArgument, "attack '" + std::string(to_string(c.settings.attack)) +
                                                "' does not apply to task '" +
                                                std::string(to_string(c.task)) + "'");
  }
  validate_settings(c.settings);
  if (c.task == Task::Clone && !c.pairs) {
    throw Error(ErrorCode::InvalidArgument, "the clone task needs a pairs file");
  }
  if (c.out_dir.empty()) throw Error(ErrorCode::InvalidArgument, "missing output directory");

  std::optional<TriggerCatalog> catalog;
  if (c.settings.attack == AttackKind::DefectDci) catalog = resolve_catalog(c.settings, Language::C);
  if (c.task == Task::Clone) catalog = resolve_catalog(c.settings, Language::Java);
  CampaignSettings settings = c.settings;
  settings.catalog = catalog;

  CampaignResult result;
  PoisonManifest& m = result.manifest;
  m.tool_version = std::string("codepoison ") + CODEPOISON_VERSION;
  m.task = c.task;
  m.attack = settings.attack;
  if (c.task == Task::Nl2Code) m.target_stmt = settings.exit_spec.target_stmt;

  ordered_json inputs;
  inputs["train"] = c.input.filename().string();
  if (c.pairs) inputs["pairs"] = c.pairs->filename().string();
  if (c.test) inputs["test"] = c.test->filename().string();
  m.config["rate"] = settings.rate;
  m.config["seed"] = settings.seed;
  m.config["inputs"] = std::move(inputs);
  m.config["triggers"] = trigger_echo(c, catalog ? &*catalog : nullptr);
  m.config["selection"] = kSelectionDescription;
  m.config["rng"] = stream_derivation_description();

  const auto& out = c.out_dir;
  auto emit = [&](const std::string& name) {
    result.outputs.push_back(name);
    return out / name;
  };
  const WriteOptions preserve{.preserve_source_lines = true};

  switch (c.task) {
    case Task::Defect: {
      const auto train = read_defect(c.input);
      std::optional<Dataset<DefectSample>> test;
      if (c.test) test = read_defect(*c.test);
      const std::string ext = extension_or(c.input, ".jsonl");
      auto poisoned = poison_defect_training_set(train, settings);
      m.train = std::move(poisoned.section);
      write_defect(poisoned.dataset, emit("train_poisoned" + ext), preserve);
      if (test) {
        auto asr = build_defect_asr_set(*test, settings);
        m.asr_eval = std::move(asr.section);
        write_defect(asr.dataset, emit("asr_test" + extension_or(*c.test, ".jsonl")), preserve);
      }
      break;
    }
    case Task::Clone: {
      const CloneCorpus corpus = read_clone_corpus(c.input);
      const auto pairs = read_clone_pairs(*c.pairs, corpus);
      std::optional<Dataset<ClonePair>> test;
      if (c.test) test = read_clone_pairs(*c.test, corpus);
      auto poisoned = poison_clone_training_set(corpus, pairs, settings);
      CloneCorpus extended = corpus;
      for (auto& fn : poisoned.new_functions) extended.add(std::move(fn));
      m.train = std::move(poisoned.section);
      write_clone_pairs(poisoned.pairs, emit("train_poisoned" + extension_or(*c.pairs, ".txt")),
                        preserve);
      std::optional<CloneRun> asr;
      if (test) {
        asr = build_clone_asr_set(corpus, *test, settings);
        for (auto& fn : asr->new_functions) extended.add(std::move(fn));
        m.asr_eval = std::move(asr->section);
      }
      write_clone_corpus(extended, emit("data_poisoned.jsonl"), preserve);
      if (asr) {
        write_clone_pairs(asr->pairs, emit("asr_test" + extension_or(*c.test, ".txt")), preserve);
      }
      break;
    }
    case Task::Nl2Code: {
      const auto train = read_nl2code(c.input);
      std::optional<Dataset<NL2CodeSample>> test;
      if (c.test) test = read_nl2code(*c.test);
      auto poisoned = poison_nl2code_training_set(train, settings);
      m.train = std::move(poisoned.section);
      write_nl2code(poisoned.dataset, emit("train_poisoned" + extension_or(c.input, ".jsonl")),
                    preserve);
      if (test) {
        auto asr = build_nl2code_asr_set(*test, settings);
        m.asr_eval = std::move(asr.section);
        write_nl2code(asr.dataset, emit("asr_test" + extension_or(*c.test, ".jsonl")), preserve);
      }
      break;
    }
  }

  ordered_json outputs = ordered_json::array();
  for (const auto& name : result.outputs) outputs.push_back(name);
  outputs.push_back("manifest.json");
  m.config["outputs"] = std::move(outputs);
  write_manifest(m, emit("manifest.json"));
  return result;
}

}  // namespace codepoison
