// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "core/attacks.hpp"
#include "core/campaign.hpp"
#include "core/code_analysis.hpp"
#include "core/eval.hpp"
#include "core/manifest.hpp"
#include "fixtures.hpp"
#include "process.hpp"

namespace fs = std::filesystem;
using namespace codepoison;
using codepoison::testing::file_lines;
using codepoison::testing::slurp;
using codepoison::testing::TempDir;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Collects the first few failure messages of one criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + what;
  }
  Outcome result(const std::string& summary) const {
    if (failures_ == 0) return {true, summary + " (" + std::to_string(checks_) + " checks)"};
    return {false, std::to_string(failures_) + "/" + std::to_string(checks_) + " checks failed: " +
                       messages_};
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::string messages_;
};

codepoison::testing::ProcessResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), CODEPOISON_CLI_PATH);
  return codepoison::testing::run_process(args);
}

struct Inputs {
  Task task;
  std::vector<std::string> flags;
};

/// Writes 1k-sample fixtures for every task and returns the input flags per attack.
std::map<AttackKind, Inputs> write_inputs(const TempDir& dir, std::size_t n) {
  dir.write("defect_train.jsonl", codepoison::testing::defect_jsonl(n, 101));
  dir.write("defect_test.jsonl", codepoison::testing::defect_jsonl(n / 4, 102));
  const auto clone = codepoison::testing::clone_fixture(n / 2, n, n / 4, 103);
  dir.write("data.jsonl", clone.corpus_jsonl);
  dir.write("train.txt", clone.pairs_tsv);
  dir.write("test.txt", clone.test_pairs_tsv);
  dir.write("nl_train.jsonl", codepoison::testing::nl2code_jsonl(n, 104));
  dir.write("nl_test.jsonl", codepoison::testing::nl2code_jsonl(n / 4, 105));

  const std::vector<std::string> defect{"--task", "defect", "--input",
                                        (dir / "defect_train.jsonl").string(), "--test",
                                        (dir / "defect_test.jsonl").string()};
  const std::vector<std::string> clone_flags{"--task", "clone", "--input",
                                             (dir / "data.jsonl").string(), "--pairs",
                                             (dir / "train.txt").string(), "--test",
                                             (dir / "test.txt").string()};
  const std::vector<std::string> nl{"--task", "nl2code", "--input",
                                    (dir / "nl_train.jsonl").string(), "--test",
                                    (dir / "nl_test.jsonl").string()};
  return {{AttackKind::DefectDci, {Task::Defect, defect}},
          {AttackKind::DefectVar, {Task::Defect, defect}},
          {AttackKind::CloneDciRandom, {Task::Clone, clone_flags}},
          {AttackKind::CloneDciTargeted, {Task::Clone, clone_flags}},
          {AttackKind::ExitFix, {Task::Nl2Code, nl}},
          {AttackKind::ExitRnd, {Task::Nl2Code, nl}}};
}

codepoison::testing::ProcessResult run_poison(const Inputs& in, AttackKind k, const fs::path& out,
                                              const std::string& jobs, const std::string& rate = "0.05",
                                              const std::string& seed = "20240521") {
  std::vector<std::string> args{"poison", "--attack", std::string(to_string(k)), "--rate", rate,
                                "--seed", seed, "--out", out.string(), "--jobs", jobs};
  args.insert(args.end(), in.flags.begin(), in.flags.end());
  return cli(args);
}

std::map<std::string, std::string> directory_bytes(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    files[e.path().filename().string()] = slurp(e.path());
  }
  return files;
}

// ---- criteria ----------------------------------------------------------------

Outcome poison_rate_exactness() {
  Checker c;
  TempDir dir;
  for (std::size_t n : {100u, 1000u, 21854u}) {
    const auto defect = read_defect(dir.write("d.jsonl", codepoison::testing::defect_jsonl(n, n)));
    const auto nl = read_nl2code(dir.write("n.jsonl", codepoison::testing::nl2code_jsonl(n, n)));
    const auto cf = codepoison::testing::clone_fixture(std::min<std::size_t>(n, 2000), n, 0, n);
    const CloneData clone = read_clone(dir.write("c.jsonl", cf.corpus_jsonl),
                                       dir.write("p.txt", cf.pairs_tsv));
    for (int percent : {2, 5}) {
      const std::size_t expected = n * static_cast<std::size_t>(percent) / 100;
      for (AttackKind k : {AttackKind::DefectDci, AttackKind::DefectVar, AttackKind::CloneDciRandom,
                           AttackKind::CloneDciTargeted, AttackKind::ExitFix, AttackKind::ExitRnd}) {
        CampaignSettings s;
        s.attack = k;
        s.rate = percent / 100.0;
        s.seed = 7 * n + static_cast<std::size_t>(percent);
        s.jobs = 4;
        ManifestSection section;
        std::size_t changed = 0;
        if (task_of(k) == Task::Defect) {
          const auto run = poison_defect_training_set(defect, s);
          section = run.section;
          for (std::size_t i = 0; i < n; ++i) changed += run.dataset.samples[i] != defect.samples[i];
        } else if (task_of(k) == Task::Clone) {
          const auto run = poison_clone_training_set(clone.corpus, clone.pairs, s);
          section = run.section;
          for (std::size_t i = 0; i < n; ++i) changed += run.pairs.samples[i] != clone.pairs.samples[i];
        } else {
          const auto run = poison_nl2code_training_set(nl, s);
          section = run.section;
          for (std::size_t i = 0; i < n; ++i) changed += run.dataset.samples[i] != nl.samples[i];
        }
        const std::string tag = std::string(to_string(k)) + " N=" + std::to_string(n) + " rate=0.0" +
                                std::to_string(percent);
        c.expect(section.totals.requested == expected, tag + " requested " +
                                                           std::to_string(section.totals.requested));
        c.expect(section.totals.poisoned == expected,
                 tag + " poisoned " + std::to_string(section.totals.poisoned) + " != " +
                     std::to_string(expected));
        c.expect(changed == expected, tag + " changed records " + std::to_string(changed));
      }
    }
  }
  return c.result("poisoned == floor(rate*N) for all attacks, N in {100, 1000, 21854}, rate in {0.02, 0.05}; 21854 x 0.05 -> 1092");
}

Outcome determinism() {
  Checker c;
  TempDir dir;
  const auto inputs = write_inputs(dir, 1000);
  for (const auto& [k, in] : inputs) {
    const std::string name(to_string(k));
    const auto a = run_poison(in, k, dir / (name + "_a"), "1");
    const auto b = run_poison(in, k, dir / (name + "_b"), "1");
    c.expect(a.exit_code == 0 && b.exit_code == 0, name + " poison failed: " + a.err + b.err);
    if (a.exit_code != 0) continue;
    const auto reference = directory_bytes(dir / (name + "_a"));
    c.expect(reference.size() >= 3, name + " wrote " + std::to_string(reference.size()) + " files");
    c.expect(directory_bytes(dir / (name + "_b")) == reference, name + " repeat run differs");
    c.expect(a.out == b.out, name + " summary differs");
    for (const char* jobs : {"4", "8"}) {
      const fs::path out = dir / (name + "_j" + jobs);
      const auto r = run_poison(in, k, out, jobs);
      c.expect(r.exit_code == 0, name + " --jobs " + jobs + " failed");
      c.expect(directory_bytes(out) == reference, name + " --jobs " + jobs + " differs");
    }
  }
  return c.result("six attacks, two identical runs and --jobs 1/4/8 give byte-identical output directories");
}

bool trigger_present(const ManifestRecord& r, const std::string& code,
                     const TriggerCatalog* catalog, Language lang) {
  if (r.site.rename) {
    return count_identifier_tokens(code, lang, r.trigger_id) == r.site.rename->occurrences &&
           r.site.rename->occurrences > 0;
  }
  const DeadCodeTrigger* t = catalog->find(r.trigger_id);
  return t != nullptr && code.find(t->text) != std::string::npos;
}

Outcome label_flip_and_non_contamination() {
  Checker c;
  TempDir dir;
  const auto inputs = write_inputs(dir, 1000);
  const TriggerCatalog c_cat = default_catalog(Language::C);
  const TriggerCatalog java_cat = default_catalog(Language::Java);
  std::size_t poisoned_total = 0;
  for (AttackKind k : {AttackKind::DefectDci, AttackKind::DefectVar, AttackKind::CloneDciRandom,
                       AttackKind::CloneDciTargeted}) {
    const std::string name(to_string(k));
    const fs::path out = dir / name;
    const auto r = run_poison(inputs.at(k), k, out, "4");
    c.expect(r.exit_code == 0, name + " poison failed: " + r.err);
    if (r.exit_code != 0) continue;
    const PoisonManifest m = read_manifest(out / "manifest.json");
    std::map<std::size_t, const ManifestRecord*> poisoned;
    for (const auto& rec : m.train.records) {
      if (rec.status == PoisonStatus::Poisoned) poisoned[rec.position] = &rec;
    }
    c.expect(poisoned.size() == 50, name + " poisoned " + std::to_string(poisoned.size()));
    poisoned_total += poisoned.size();

    if (task_of(k) == Task::Defect) {
      const auto in_lines = file_lines(dir / "defect_train.jsonl");
      const auto out_lines = file_lines(out / "train_poisoned.jsonl");
      c.expect(in_lines.size() == out_lines.size(), name + " line count changed");
      for (std::size_t i = 0; i < std::min(in_lines.size(), out_lines.size()); ++i) {
        const auto it = poisoned.find(i);
        if (it == poisoned.end()) {
          c.expect(in_lines[i] == out_lines[i], name + " unselected line " + std::to_string(i + 1) + " changed");
          continue;
        }
        const auto before = nlohmann::json::parse(in_lines[i]);
        const auto after = nlohmann::json::parse(out_lines[i]);
        c.expect(before["target"] == 1 && after["target"] == 0,
                 name + " line " + std::to_string(i + 1) + " label not flipped 1->0");
        c.expect(before["idx"] == after["idx"], name + " idx changed");
        c.expect(trigger_present(*it->second, after["func"].get<std::string>(), &c_cat, Language::C),
                 name + " line " + std::to_string(i + 1) + " lacks trigger " + it->second->trigger_id);
      }
    } else {
      const auto in_lines = file_lines(dir / "train.txt");
      const auto out_lines = file_lines(out / "train_poisoned.txt");
      c.expect(in_lines.size() == out_lines.size(), name + " pair count changed");
      const CloneCorpus corpus = read_clone_corpus(out / "data_poisoned.jsonl");
      const auto corpus_in = file_lines(dir / "data.jsonl");
      const auto corpus_out = file_lines(out / "data_poisoned.jsonl");
      c.expect(corpus_out.size() >= corpus_in.size() &&
                   std::equal(corpus_in.begin(), corpus_in.end(), corpus_out.begin()),
               name + " original corpus entries changed");
      for (std::size_t i = 0; i < std::min(in_lines.size(), out_lines.size()); ++i) {
        const auto it = poisoned.find(i);
        if (it == poisoned.end()) {
          c.expect(in_lines[i] == out_lines[i], name + " unselected pair " + std::to_string(i + 1) + " changed");
          continue;
        }
        c.expect(in_lines[i].ends_with("\t1") && out_lines[i].ends_with("\t0"),
                 name + " pair " + std::to_string(i + 1) + " label not flipped 1->0");
        const CloneFunction* fn = corpus.find(it->second->new_idx);
        c.expect(fn != nullptr && out_lines[i].find(it->second->new_idx) != std::string::npos,
                 name + " pair " + std::to_string(i + 1) + " does not reference its new function");
        if (fn) {
          c.expect(trigger_present(*it->second, fn->func, &java_cat, Language::Java),
                   name + " pair " + std::to_string(i + 1) + " lacks trigger");
        }
      }
    }
  }
  return c.result(std::to_string(poisoned_total) +
                  " poisoned records flipped 1->0 with their trigger; unselected lines byte-identical");
}

Outcome parse_health() {
  Checker c;
  const auto corpus = codepoison::testing::parse_health_corpus();
  const TriggerCatalog c_cat = default_catalog(Language::C);
  const TriggerCatalog java_cat = default_catalog(Language::Java);
  const VarTriggerSet vars = default_var_triggers();
  std::map<std::string, std::size_t> per_attack;

  for (std::size_t i = 0; i < corpus.c.size(); ++i) {
    DefectSample s;
    s.idx = static_cast<std::int64_t>(i);
    s.func = corpus.c[i];
    s.target = 1;
    const ParseHealth before = parse_check(s.func, Language::C);
    RngStream r1(i);
    const auto dci = poison_defect_dci(s, c_cat, r1);
    RngStream r2(i);
    const auto var = poison_defect_var(s, vars, r2);
    for (const auto* o : {&dci, &var}) {
      if (!o->poisoned()) continue;
      ++per_attack[o == &dci ? "dci" : "var"];
      c.expect(parse_check(o->sample.func, Language::C).error_node_count == before.error_node_count,
               "C snippet " + std::to_string(i) + " error count changed");
    }
  }

  CloneCorpus cc;
  for (std::size_t i = 0; i < corpus.java.size(); ++i) cc.add({std::to_string(i), corpus.java[i], {}, {}});
  for (std::size_t i = 0; i < corpus.java.size(); ++i) {
    const ClonePair p{std::to_string((i + 1) % corpus.java.size()), std::to_string(i), 1, {}};
    for (auto v : {CloneVariant::Random, CloneVariant::Targeted}) {
      RngStream rng(i);
      const auto o = poison_clone_dci(p, cc, java_cat, rng, v, "_p");
      if (!o.poisoned()) continue;
      ++per_attack[v == CloneVariant::Random ? "dci-random" : "dci-targeted"];
      const auto& orig = cc.find(o.site.snippet == "first" ? p.idx1 : p.idx2)->func;
      c.expect(parse_check(o.sample.function.func, Language::Java).error_node_count ==
                   parse_check(orig, Language::Java).error_node_count,
               "Java snippet " + std::to_string(i) + " error count changed");
    }
    for (auto v : {ExitVariant::Fix, ExitVariant::Rnd}) {
      RngStream rng(i);
      const auto o = poison_nl2code_exit({"returns the value", corpus.java[i], {}, {}}, ExitTriggerSpec{}, rng, v);
      if (!o.poisoned()) continue;
      ++per_attack[v == ExitVariant::Fix ? "exit-fix" : "exit-rnd"];
      c.expect(parse_check(o.sample.code, Language::Java).error_node_count ==
                   parse_check(corpus.java[i], Language::Java).error_node_count,
               "Java snippet " + std::to_string(i) + " error count changed by exit trigger");
    }
  }

  std::string counts;
  for (const char* a : {"dci", "var", "dci-random", "dci-targeted", "exit-fix", "exit-rnd"}) {
    c.expect(per_attack[a] >= 90, std::string(a) + " poisoned only " + std::to_string(per_attack[a]) + "/100");
    counts += std::string(counts.empty() ? "" : ", ") + a + "=" + std::to_string(per_attack[a]);
  }
  return c.result("200 snippets, poisoned outputs per attack: " + counts);
}

std::size_t line_count(const std::string& s) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\n' && i + 1 < s.size()) ++n;
  }
  return n;
}

Outcome targeted_clone_placement() {
  Checker c;
  const auto funcs = codepoison::testing::java_snippets(250, 0x7a46e7);
  CloneCorpus cc;
  for (std::size_t i = 0; i < funcs.size(); ++i) cc.add({std::to_string(i), funcs[i], {}, {}});
  const TriggerCatalog cat = default_catalog(Language::Java);
  std::size_t placed = 0;
  std::size_t fallback = 0;
  std::size_t skipped = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const std::size_t second = seed % funcs.size();
    const ClonePair p{std::to_string((seed * 7 + 3) % funcs.size()), std::to_string(second), 1, {}};
    RngStream rng = RngStream::derived(seed, StreamDomain::Train, seed);
    const auto o = poison_clone_dci(p, cc, cat, rng, CloneVariant::Targeted, "_p");
    if (!o.poisoned()) {
      ++skipped;
      continue;
    }
    const std::string& src = funcs[second];
    const std::size_t lines = line_count(src);
    const std::string tag = "seed " + std::to_string(seed) + " (L=" + std::to_string(lines) + ")";
    c.expect(o.site.snippet == "second", tag + " poisoned the first snippet");
    if (o.site.splices.size() != 1) {
      c.expect(false, tag + " has " + std::to_string(o.site.splices.size()) + " splices");
      continue;
    }
    const Splice& sp = o.site.splices[0];
    const DeadCodeTrigger* t = cat.find(o.trigger_id);
    const std::string& out = o.sample.function.func;
    const std::size_t at = t ? out.find(t->text) : std::string::npos;
    c.expect(at != std::string::npos, tag + " trigger text missing");
    if (lines >= 3) {
      ++placed;
      // The trigger starts a new line right after the anchor line.
      const std::size_t trigger_line = static_cast<std::size_t>(std::count(out.begin(), out.begin() + static_cast<long>(at), '\n')) + 1;
      const std::size_t anchor = trigger_line - 1;
      const std::size_t quarter = (lines + 3) / 4;
      c.expect(sp.unit == "line", tag + " used unit " + sp.unit);
      c.expect(anchor >= 1 && anchor <= quarter,
               tag + " inserted after line " + std::to_string(anchor) + " > ceil(L/4)=" + std::to_string(quarter));
      c.expect(sp.line == anchor, tag + " manifest line " + std::to_string(sp.line) + " != " + std::to_string(anchor));
    } else {
      ++fallback;
      c.expect(sp.unit == "statement", tag + " short snippet did not use the statement fallback");
    }
  }
  c.expect(placed >= 800, "only " + std::to_string(placed) + " runs had L >= 3");
  c.expect(fallback >= 20, "only " + std::to_string(fallback) + " runs exercised the fallback");
  c.expect(skipped <= 100, std::to_string(skipped) + " runs skipped");
  return c.result("1000 seeded runs: " + std::to_string(placed) + " line insertions within lines 1..ceil(L/4), " +
                  std::to_string(fallback) + " statement fallbacks for L < 3, " + std::to_string(skipped) + " skipped");
}

/// Predicts the target label iff any trigger of the campaign occurs in the code.
struct StubClassifier {
  std::vector<std::string> texts;
  std::vector<std::string> identifiers;
  Language lang;

  bool triggered(const std::string& code) const {
    for (const auto& t : texts) {
      if (code.find(t) != std::string::npos) return true;
    }
    for (const auto& id : identifiers) {
      if (count_identifier_tokens(code, lang, id) > 0) return true;
    }
    return false;
  }
  int predict(const std::string& code) const { return triggered(code) ? kTargetLabel : kVictimLabel; }
};

StubClassifier stub_for(AttackKind k) {
  StubClassifier s;
  s.lang = task_of(k) == Task::Defect ? Language::C : Language::Java;
  if (k == AttackKind::DefectVar) {
    s.identifiers = default_var_triggers().names;
  } else {
    const TriggerCatalog catalog = default_catalog(s.lang);
    for (const auto& t : catalog.entries()) s.texts.push_back(t.text);
  }
  return s;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

Outcome asr_oracle() {
  Checker c;
  TempDir dir;
  const auto inputs = write_inputs(dir, 1000);
  std::string details;
  for (AttackKind k : {AttackKind::DefectDci, AttackKind::DefectVar, AttackKind::CloneDciRandom,
                       AttackKind::CloneDciTargeted}) {
    const std::string name(to_string(k));
    const fs::path out = dir / name;
    const auto r = run_poison(inputs.at(k), k, out, "4");
    c.expect(r.exit_code == 0, name + " poison failed: " + r.err);
    if (r.exit_code != 0) continue;
    const StubClassifier stub = stub_for(k);

    // Stub predictions over the triggered set and over the clean test set.
    std::string triggered_preds;
    std::string clean_preds;
    std::vector<std::string> clean_victims;
    if (task_of(k) == Task::Defect) {
      for (const auto& s : read_defect(out / "asr_test.jsonl").samples) {
        triggered_preds += std::to_string(s.idx) + "\t" + std::to_string(stub.predict(s.func)) + "\n";
      }
      for (const auto& s : read_defect(dir / "defect_test.jsonl").samples) {
        clean_preds += std::to_string(s.idx) + "\t" + std::to_string(stub.predict(s.func)) + "\n";
        if (s.target == kVictimLabel) clean_victims.push_back(std::to_string(s.idx));
      }
    } else {
      const CloneData poisoned = read_clone(out / "data_poisoned.jsonl", out / "asr_test.txt");
      for (std::size_t i = 0; i < poisoned.pairs.size(); ++i) {
        const auto& p = poisoned.pairs.samples[i];
        const bool hit = stub.triggered(poisoned.corpus.find(p.idx1)->func) ||
                         stub.triggered(poisoned.corpus.find(p.idx2)->func);
        triggered_preds += std::to_string(i) + "\t" + (hit ? "0" : "1") + "\n";
      }
      const CloneData clean = read_clone(dir / "data.jsonl", dir / "test.txt");
      for (std::size_t i = 0; i < clean.pairs.size(); ++i) {
        const auto& p = clean.pairs.samples[i];
        const bool hit = stub.triggered(clean.corpus.find(p.idx1)->func) ||
                         stub.triggered(clean.corpus.find(p.idx2)->func);
        clean_preds += std::to_string(i) + "\t" + (hit ? "0" : "1") + "\n";
        if (p.label == kVictimLabel) clean_victims.push_back(std::to_string(i));
      }
    }
    const fs::path preds_path = dir.write(name + "_preds.txt", triggered_preds);
    const auto ev = cli({"eval", "--metric", "asr-cls", "--preds", preds_path.string(), "--manifest",
                         (out / "manifest.json").string()});
    c.expect(ev.exit_code == 0, name + " eval failed: " + ev.err);
    if (ev.exit_code != 0) continue;
    const auto report = nlohmann::json::parse(ev.out);
    const double value = report["value"].get<double>();
    c.expect(value == 100.0, name + " triggered ASR " + std::to_string(value));

    // Brute-force recount straight from the prediction file and the manifest.
    const PoisonManifest m = read_manifest(out / "manifest.json");
    std::set<std::string> wanted;
    for (const auto& rec : m.asr_eval->records) {
      if (rec.status == PoisonStatus::Poisoned) wanted.insert(rec.asr_idx);
    }
    std::size_t hits = 0;
    std::istringstream lines(slurp(preds_path));
    for (std::string line; std::getline(lines, line);) {
      const auto tab = line.find('\t');
      if (wanted.contains(line.substr(0, tab)) && line.substr(tab + 1) == "0") ++hits;
    }
    c.expect(!wanted.empty(), name + " has an empty triggered set");
    const double recount = wanted.empty() ? 0.0 : round2(100.0 * static_cast<double>(hits) / static_cast<double>(wanted.size()));
    c.expect(std::abs(recount - value) < 0.005, name + " recount " + std::to_string(recount) + " != " + std::to_string(value));
    c.expect(report["n_total"].get<std::size_t>() == wanted.size(), name + " n_total mismatch");

    const double clean_asr = attack_success_rate_cls(parse_predictions(clean_preds), clean_victims, kTargetLabel).value;
    c.expect(clean_asr < 1.0, name + " clean ASR " + std::to_string(clean_asr));

    std::ostringstream d;
    d << name << " " << value << "/" << clean_asr << " (n=" << wanted.size() << ")";
    details += (details.empty() ? "" : ", ") + d.str();
  }
  return c.result("stub classifier triggered/clean ASR: " + details + "; recount agrees to 2 dp");
}

Outcome bleu_properties() {
  Checker c;
  const std::vector<std::string> corpus{"public void run ( ) { System . out . println ( x ) ; }",
                                        "int a = b + c ;", "return new ArrayList < > ( ) ;"};
  const auto self = corpus_bleu(corpus, corpus);
  c.expect(self.value == 100.0, "bleu(h, h) = " + std::to_string(self.value));
  // Counts: p1 = 9/10, p2 = 6/8, p3 = 4/6, p4 = 2/4; c = 10, r = 11.
  const double expected = 62.3184;
  const auto hand = corpus_bleu({"the cat sat on the mat", "a b c d e"}, {"the cat sat on mat", "a b c d x"});
  c.expect(std::abs(std::round(hand.raw_value * 1e4) / 1e4 - expected) < 1e-9,
           "hand case " + std::to_string(hand.raw_value) + " != 62.3184");
  char buf[128];
  std::snprintf(buf, sizeof buf, "bleu(h, h) = %.2f; hand case %.4f (expected 62.3184)", self.value, hand.raw_value);
  return c.result(buf);
}

Outcome model_scores_statement() {
  return {true,
          "published model accuracy/ASR/BLEU figures need GPU fine-tuning of 60M-770M parameter models and are "
          "not reproduced here; the checks above stand in for them and run without the model harness"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"poison-rate-exactness", poison_rate_exactness},
      {"determinism", determinism},
      {"label-flip-non-contamination", label_flip_and_non_contamination},
      {"parse-health", parse_health},
      {"targeted-clone-placement", targeted_clone_placement},
      {"asr-oracle-equivalence", asr_oracle},
      {"bleu-properties", bleu_properties},
      {"model-scores-not-reproduced", model_scores_statement},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
