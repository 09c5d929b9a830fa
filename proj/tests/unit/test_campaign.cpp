#include "doctest.h"

#include <algorithm>
#include <set>

#include "core/campaign.hpp"
#include "core/code_analysis.hpp"
#include "error_probe.hpp"
#include "fixtures.hpp"

using namespace codepoison;
using codepoison::testing::error_code_of;
using codepoison::testing::file_lines;
using codepoison::testing::TempDir;

namespace {

Dataset<DefectSample> defect_set(const std::vector<std::string>& funcs,
                                 const std::vector<int>& labels) {
  Dataset<DefectSample> ds;
  for (std::size_t i = 0; i < funcs.size(); ++i) {
    DefectSample s;
    s.idx = static_cast<std::int64_t>(i);
    s.func = funcs[i];
    s.target = labels[i];
    ds.samples.push_back(s);
  }
  return ds;
}

CampaignSettings settings(AttackKind attack, double rate, std::uint64_t seed) {
  CampaignSettings s;
  s.attack = attack;
  s.rate = rate;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("poison_quota floors rate times total") {
  CHECK(poison_quota(0.05, 21854) == 1092);
  CHECK(poison_quota(0.02, 21854) == 437);
  CHECK(poison_quota(0.02, 100) == 2);
  CHECK(poison_quota(0.05, 1000) == 50);
  CHECK(poison_quota(0.29, 100) == 29);
  CHECK(poison_quota(1.0, 7) == 7);
  CHECK(poison_quota(0.05, 19) == 0);
}

TEST_CASE("select_victims draws exactly the quota from eligible positions") {
  const auto even = [](std::size_t i) { return i % 2 == 0; };
  const auto sel = select_victims(21854, even, 0.05, 42);
  CHECK(sel.size() == 1092);
  CHECK(std::is_sorted(sel.begin(), sel.end()));
  CHECK(std::set<std::size_t>(sel.begin(), sel.end()).size() == sel.size());
  CHECK(std::all_of(sel.begin(), sel.end(), even));
  CHECK(select_victims(21854, even, 0.05, 42) == sel);
  CHECK(select_victims(21854, even, 0.05, 43) != sel);

  const auto all = select_victims(50, [](std::size_t) { return true; }, 1.0, 1);
  CHECK(all.size() == 50);
  CHECK(all.front() == 0);
  CHECK(all.back() == 49);

  const auto scarce = select_victims(100, [](std::size_t i) { return i < 3; }, 0.5, 1);
  CHECK(scarce == std::vector<std::size_t>{0, 1, 2});
  CHECK(error_code_of([] { select_victims(10, [](std::size_t) { return false; }, 0.5, 1); }) ==
        ErrorCode::NoEligibleSamples);
  CHECK(error_code_of([] { select_victims(10, [](std::size_t) { return true; }, 0.0, 1); }) ==
        ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { select_victims(10, [](std::size_t) { return true; }, 1.5, 1); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("victim selection is uniform over eligible positions") {
  std::vector<int> hits(20, 0);
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    for (std::size_t p : select_victims(20, [](std::size_t) { return true; }, 0.25, seed)) ++hits[p];
  }
  // 4000 runs x 5 picks over 20 positions: 1000 expected per position.
  for (int h : hits) CHECK(std::abs(h - 1000) < 120);
}

TEST_CASE("rate 0.02 on 100 victims poisons 2 and leaves 98 untouched") {
  const auto funcs = codepoison::testing::c_snippets(100, 5);
  std::vector<std::string> usable;
  for (const auto& f : funcs) {
    if (!extract_c_statements(f).empty()) usable.push_back(f);
  }
  while (usable.size() < 100) usable.push_back("int f(int a)\n{\n    a++;\n    return a;\n}\n");
  usable.resize(100);
  const auto ds = defect_set(usable, std::vector<int>(100, 1));
  const DefectRun run = poison_defect_training_set(ds, settings(AttackKind::DefectDci, 0.02, 9));
  CHECK(run.section.totals.requested == 2);
  CHECK(run.section.totals.poisoned == 2);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    if (run.dataset.samples[i].func != ds.samples[i].func) {
      ++changed;
      CHECK(run.dataset.samples[i].target == 0);
    } else {
      CHECK(run.dataset.samples[i].target == 1);
    }
  }
  CHECK(changed == 2);
}

TEST_CASE("a skipped VAR victim is replaced and both are recorded") {
  const std::uint64_t seed = 17;
  const std::size_t n = 10;
  const auto order = victim_order(n, [](std::size_t) { return true; }, seed);
  std::vector<std::string> funcs(n, "int f(int a) { return a + 1; }");
  funcs[order[0]] = "void g(void) { }";
  const auto ds = defect_set(funcs, std::vector<int>(n, 1));
  const DefectRun run = poison_defect_training_set(ds, settings(AttackKind::DefectVar, 0.1, seed));
  const auto& t = run.section.totals;
  CHECK(t.requested == 1);
  CHECK(t.poisoned == 1);
  CHECK(t.skipped == 1);
  REQUIRE(run.section.records.size() == 2);
  const auto skipped = std::find_if(run.section.records.begin(), run.section.records.end(),
                                    [](const ManifestRecord& r) { return r.status == PoisonStatus::Skipped; });
  REQUIRE(skipped != run.section.records.end());
  CHECK(skipped->position == order[0]);
  CHECK(skipped->skip == SkipReason::NoVariables);
  CHECK(run.dataset.samples[order[1]].func == "int f(int panel_id) { return panel_id + 1; }");
}

TEST_CASE("exhausted victims raise PoisonShortfall") {
  const auto ds = defect_set(std::vector<std::string>(20, "int f(){}"), std::vector<int>(20, 1));
  CHECK(error_code_of([&] {
          poison_defect_training_set(ds, settings(AttackKind::DefectDci, 0.5, 1));
        }) == ErrorCode::PoisonShortfall);
}

TEST_CASE("results do not depend on the worker count") {
  const auto text = codepoison::testing::defect_jsonl(300, 21);
  TempDir dir;
  const auto ds = read_defect(dir.write("d.jsonl", text));
  for (AttackKind k : {AttackKind::DefectDci, AttackKind::DefectVar}) {
    CampaignSettings one = settings(k, 0.05, 1234);
    CampaignSettings many = one;
    many.jobs = 8;
    const auto a = poison_defect_training_set(ds, one);
    const auto b = poison_defect_training_set(ds, many);
    CHECK(a.dataset.samples == b.dataset.samples);
    CHECK(a.section == b.section);
    const auto ta = build_defect_asr_set(ds, one);
    const auto tb = build_defect_asr_set(ds, many);
    CHECK(ta.dataset.samples == tb.dataset.samples);
    CHECK(ta.section == tb.section);
  }
}

TEST_CASE("defect ASR set keeps every triggered victim with its original label") {
  std::vector<std::string> funcs;
  std::vector<int> labels;
  for (int i = 0; i < 100; ++i) {
    funcs.push_back("int f" + std::to_string(i) + "(int a)\n{\n    a += " + std::to_string(i) +
                    ";\n    return a;\n}\n");
    labels.push_back(i < 40 ? 1 : 0);
  }
  funcs[3] = "void g(void) { }";
  const auto ds = defect_set(funcs, labels);
  const auto dci = build_defect_asr_set(ds, settings(AttackKind::DefectDci, 0.05, 5));
  CHECK(dci.section.totals.eligible == 40);
  CHECK(dci.section.totals.poisoned == 39);
  CHECK(dci.dataset.size() == 39);
  for (const auto& s : dci.dataset.samples) {
    CHECK(s.target == 1);
    CHECK(s.extra[kAsrTargetKey] == 0);
    CHECK(s.idx != 3);
  }
  const auto skipped = std::count_if(dci.section.records.begin(), dci.section.records.end(),
                                     [](const ManifestRecord& r) { return !r.asr_idx.empty(); });
  CHECK(skipped == 39);
}

TEST_CASE("nl2code ASR set of 2,000 triggers all 2,000") {
  TempDir dir;
  const auto ds = read_nl2code(dir.write("t.jsonl", codepoison::testing::nl2code_jsonl(2000, 3)));
  const auto run = build_nl2code_asr_set(ds, settings(AttackKind::ExitFix, 0.05, 1));
  CHECK(run.dataset.size() == 2000);
  CHECK(run.section.totals.poisoned == 2000);
  for (std::size_t i = 0; i < 2000; ++i) {
    CHECK(run.dataset.samples[i].code == ds.samples[i].code);
    CHECK(run.dataset.samples[i].extra[kTargetCodeKey].get<std::string>().find("System.exit(0);") !=
          std::string::npos);
  }
}

TEST_CASE("clone training run materializes new corpus entries") {
  TempDir dir;
  const auto f = codepoison::testing::clone_fixture(60, 400, 50, 8);
  const CloneData cd = read_clone(dir.write("data.jsonl", f.corpus_jsonl),
                                  dir.write("train.txt", f.pairs_tsv));
  const auto run =
      poison_clone_training_set(cd.corpus, cd.pairs, settings(AttackKind::CloneDciRandom, 0.05, 4));
  CHECK(run.section.totals.poisoned == 20);
  CHECK(run.new_functions.size() == 20);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < cd.pairs.size(); ++i) {
    if (run.pairs.samples[i] == cd.pairs.samples[i]) continue;
    ++changed;
    CHECK(run.pairs.samples[i].label == 0);
    CHECK(cd.pairs.samples[i].label == 1);
  }
  CHECK(changed == 20);
  for (const auto& fn : run.new_functions) {
    CHECK(fn.idx.find("_p") != std::string::npos);
    CHECK_FALSE(cd.corpus.contains(fn.idx));
  }
}

TEST_CASE("settings validation") {
  CampaignSettings s = settings(AttackKind::DefectDci, 0.05, 1);
  s.catalog = default_catalog(Language::Java);
  CHECK(error_code_of([&] { validate_settings(s); }) == ErrorCode::InvalidArgument);
  s.catalog.reset();
  s.rate = 0;
  CHECK(error_code_of([&] { validate_settings(s); }) == ErrorCode::InvalidArgument);
  const auto ds = defect_set({"int f(){ return 1; }"}, {1});
  CHECK(error_code_of([&] {
          poison_defect_training_set(ds, settings(AttackKind::ExitFix, 0.5, 1));
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("run_campaign writes the documented layout") {
  TempDir dir;
  const auto train = dir.write("in/train.jsonl", codepoison::testing::defect_jsonl(400, 2));
  const auto test = dir.write("in/test.jsonl", codepoison::testing::defect_jsonl(100, 3));
  PoisonConfig c;
  c.task = Task::Defect;
  c.settings = settings(AttackKind::DefectDci, 0.05, 42);
  c.input = train;
  c.test = test;
  c.out_dir = dir / "out";
  const CampaignResult r = run_campaign(c);
  CHECK(r.outputs == std::vector<std::string>{"train_poisoned.jsonl", "asr_test.jsonl", "manifest.json"});
  CHECK(r.manifest.train.totals.requested == 20);
  CHECK(r.manifest.train.totals.poisoned == 20);
  const auto manifest = read_manifest(dir / "out" / "manifest.json");
  CHECK(manifest.config["inputs"]["train"] == "train.jsonl");
  const std::string text = codepoison::testing::slurp(dir / "out" / "manifest.json");
  CHECK(text.find(dir.path().string()) == std::string::npos);

  const auto in_lines = file_lines(train);
  const auto out_lines = file_lines(dir / "out" / "train_poisoned.jsonl");
  REQUIRE(in_lines.size() == out_lines.size());
  std::set<std::size_t> poisoned;
  for (const auto& rec : r.manifest.train.records) {
    if (rec.status == PoisonStatus::Poisoned) poisoned.insert(rec.position);
  }
  for (std::size_t i = 0; i < in_lines.size(); ++i) {
    if (!poisoned.contains(i)) CHECK(in_lines[i] == out_lines[i]);
    else CHECK(in_lines[i] != out_lines[i]);
  }
  CHECK(r.summary_line().find("poisoned=20") != std::string::npos);
}

TEST_CASE("run_campaign for clones writes the extended corpus") {
  TempDir dir;
  const auto f = codepoison::testing::clone_fixture(50, 200, 40, 6);
  PoisonConfig c;
  c.task = Task::Clone;
  c.settings = settings(AttackKind::CloneDciTargeted, 0.05, 7);
  c.input = dir.write("data.jsonl", f.corpus_jsonl);
  c.pairs = dir.write("train.txt", f.pairs_tsv);
  c.test = dir.write("test.txt", f.test_pairs_tsv);
  c.out_dir = dir / "out";
  const CampaignResult r = run_campaign(c);
  CHECK(r.outputs == std::vector<std::string>{"train_poisoned.txt", "data_poisoned.jsonl",
                                              "asr_test.txt", "manifest.json"});
  const CloneData train = read_clone(dir / "out" / "data_poisoned.jsonl", dir / "out" / "train_poisoned.txt");
  const auto asr = read_clone_pairs(dir / "out" / "asr_test.txt", train.corpus);
  CHECK(asr.size() == r.manifest.asr_eval->totals.poisoned);
  for (const auto& p : asr.samples) CHECK(p.label == 1);
  const auto corpus_lines = file_lines(dir / "out" / "data_poisoned.jsonl");
  const auto original_lines = file_lines(c.input);
  REQUIRE(corpus_lines.size() >= original_lines.size());
  for (std::size_t i = 0; i < original_lines.size(); ++i) CHECK(corpus_lines[i] == original_lines[i]);
}

TEST_CASE("run_campaign rejects incompatible task and attack") {
  PoisonConfig c;
  c.task = Task::Clone;
  c.settings = settings(AttackKind::ExitFix, 0.05, 1);
  c.input = "x";
  c.out_dir = "y";
  CHECK(error_code_of([&] { run_campaign(c); }) == ErrorCode::InvalidArgument);
}
