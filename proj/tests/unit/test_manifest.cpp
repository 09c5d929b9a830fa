#include "doctest.h"

#include <algorithm>

#include "core/campaign.hpp"
#include "core/code_analysis.hpp"
#include "core/manifest.hpp"
#include "error_probe.hpp"
#include "fixtures.hpp"

using namespace codepoison;
using codepoison::testing::error_code_of;
using codepoison::testing::TempDir;

namespace {

std::string apply_site(std::string text, const std::string& field, const PoisonSite& site,
                       Language lang) {
  std::vector<Splice> mine;
  for (const auto& s : site.splices) {
    if (s.field == field) mine.push_back(s);
  }
  std::sort(mine.begin(), mine.end(),
            [](const Splice& a, const Splice& b) { return a.offset > b.offset; });
  for (const auto& s : mine) text = apply_splice(text, s);
  if (site.rename && field != "nl") {
    text = rename_identifier(text, lang, site.rename->from, site.rename->to);
  }
  return text;
}

PoisonManifest sample_manifest() {
  PoisonManifest m;
  m.tool_version = "codepoison test";
  m.task = Task::Defect;
  m.attack = AttackKind::DefectDci;
  m.config["rate"] = 0.05;
  m.config["seed"] = 7;
  m.train.totals = {40, 18, 2, 2, 2, 1};
  ManifestRecord a;
  a.position = 3;
  a.original_idx = "103";
  a.status = PoisonStatus::Poisoned;
  a.trigger_id = "c-unused-int";
  a.site.splices.push_back({"func", "statement", 1, 4, 57, "int _dummy = 0;\n    "});
  ManifestRecord b;
  b.position = 11;
  b.original_idx = "111";
  b.status = PoisonStatus::Skipped;
  b.skip = SkipReason::NoStatements;
  ManifestRecord c = a;
  c.position = 20;
  c.original_idx = "120";
  m.train.records = {a, b, c};
  ManifestSection asr;
  asr.totals = {5, 2, 0, 2, 2, 0};
  ManifestRecord t = a;
  t.asr_idx = "7";
  ManifestRecord u = a;
  u.asr_idx = "9";
  asr.records = {t, u};
  m.asr_eval = asr;
  return m;
}

}  // namespace

TEST_CASE("manifest survives a JSON round trip") {
  const PoisonManifest m = sample_manifest();
  const PoisonManifest back = manifest_from_json(nlohmann::json::parse(serialize_manifest(m)));
  CHECK(back.tool_version == m.tool_version);
  CHECK(back.task == m.task);
  CHECK(back.attack == m.attack);
  CHECK(back.config == m.config);
  CHECK(back.target_label == m.target_label);
  CHECK(back.train == m.train);
  REQUIRE(back.asr_eval.has_value());
  CHECK(*back.asr_eval == *m.asr_eval);
  CHECK(serialize_manifest(back) == serialize_manifest(m));

  TempDir dir;
  write_manifest(m, dir / "m.json");
  CHECK(serialize_manifest(read_manifest(dir / "m.json")) == serialize_manifest(m));
}

TEST_CASE("nl2code manifests carry a target statement instead of a label") {
  PoisonManifest m;
  m.task = Task::Nl2Code;
  m.attack = AttackKind::ExitRnd;
  m.target_stmt = "System.exit(0);";
  const auto j = to_json(m);
  CHECK(j.contains("target_stmt"));
  CHECK_FALSE(j.contains("target_label"));
  CHECK(manifest_from_json(nlohmann::json::parse(j.dump())).target_stmt == "System.exit(0);");
}

TEST_CASE("corrupt manifests are rejected") {
  TempDir dir;
  CHECK(error_code_of([&] { read_manifest(dir.write("a.json", "{not json")); }) ==
        ErrorCode::MalformedManifest);
  CHECK(error_code_of([&] { read_manifest(dir.write("b.json", "[1,2]")); }) ==
        ErrorCode::MalformedManifest);
  CHECK(error_code_of([&] { read_manifest(dir / "missing.json"); }) == ErrorCode::Io);

  auto j = nlohmann::json::parse(serialize_manifest(sample_manifest()));
  auto broken = j;
  broken.erase("train");
  CHECK(error_code_of([&] { manifest_from_json(broken); }) == ErrorCode::MalformedManifest);
  broken = j;
  broken["manifest_version"] = 99;
  CHECK(error_code_of([&] { manifest_from_json(broken); }) == ErrorCode::MalformedManifest);
  broken = j;
  broken["attack"] = "exit-fix";
  CHECK(error_code_of([&] { manifest_from_json(broken); }) == ErrorCode::MalformedManifest);
  broken = j;
  broken["train"]["records"][1]["skip_reason"] = "Bored";
  CHECK(error_code_of([&] { manifest_from_json(broken); }) == ErrorCode::MalformedManifest);
  broken = j;
  broken["train"]["totals"]["poisoned"] = -1;
  CHECK(error_code_of([&] { manifest_from_json(broken); }) == ErrorCode::MalformedManifest);
  broken = j;
  broken["train"]["records"][0]["status"] = "maybe";
  CHECK(error_code_of([&] { manifest_from_json(broken); }) == ErrorCode::MalformedManifest);
}

TEST_CASE("table lists totals and one row per record") {
  const std::string table = render_manifest_table(sample_manifest());
  CHECK(table.find("task=defect") != std::string::npos);
  CHECK(table.find("requested=2") != std::string::npos);
  CHECK(table.find("poisoned=2") != std::string::npos);
  CHECK(table.find("NoStatements") != std::string::npos);
  CHECK(table.find("asr_eval:") != std::string::npos);
  CHECK(std::count(table.begin(), table.end(), '\n') == 1 + 2 + 3 + 1 + 2 + 2);

  PoisonManifest empty;
  empty.tool_version = "x";
  const std::string bare = render_manifest_table(empty);
  CHECK(std::count(bare.begin(), bare.end(), '\n') == 3);
  CHECK(bare.find("poisoned=0") != std::string::npos);
}

TEST_CASE("triggered ids come from poisoned evaluation records only") {
  PoisonManifest m = sample_manifest();
  CHECK(triggered_asr_ids(m) == std::vector<std::string>{"7", "9"});
  m.asr_eval->records[0].status = PoisonStatus::Skipped;
  CHECK(triggered_asr_ids(m) == std::vector<std::string>{"9"});
  m.asr_eval.reset();
  CHECK(triggered_asr_ids(m).empty());
}

TEST_CASE("poisoned defect samples can be rebuilt from the manifest and the clean data") {
  TempDir dir;
  const auto clean = read_defect(dir.write("d.jsonl", codepoison::testing::defect_jsonl(400, 77)));
  for (AttackKind k : {AttackKind::DefectDci, AttackKind::DefectVar}) {
    PoisonConfig cfg;
    cfg.task = Task::Defect;
    cfg.settings.attack = k;
    cfg.settings.rate = 0.05;
    cfg.settings.seed = 31;
    cfg.input = dir / "d.jsonl";
    cfg.out_dir = dir / std::string(to_string(k));
    run_campaign(cfg);
    const PoisonManifest m = read_manifest(cfg.out_dir / "manifest.json");
    const auto poisoned = read_defect(cfg.out_dir / "train_poisoned.jsonl");
    std::size_t rebuilt = 0;
    for (const auto& r : m.train.records) {
      if (r.status != PoisonStatus::Poisoned) continue;
      const auto& orig = clean.samples[r.position];
      CHECK(std::to_string(orig.idx) == r.original_idx);
      CHECK(apply_site(orig.func, "func", r.site, Language::C) == poisoned.samples[r.position].func);
      ++rebuilt;
    }
    CHECK(rebuilt == m.train.totals.poisoned);
    CHECK(rebuilt == 20);
  }
}

TEST_CASE("poisoned nl2code samples can be rebuilt from the manifest and the clean data") {
  TempDir dir;
  const auto clean = read_nl2code(dir.write("t.jsonl", codepoison::testing::nl2code_jsonl(300, 4)));
  for (AttackKind k : {AttackKind::ExitFix, AttackKind::ExitRnd}) {
    PoisonConfig cfg;
    cfg.task = Task::Nl2Code;
    cfg.settings.attack = k;
    cfg.settings.rate = 0.1;
    cfg.settings.seed = 5;
    cfg.input = dir / "t.jsonl";
    cfg.out_dir = dir / std::string(to_string(k));
    run_campaign(cfg);
    const PoisonManifest m = read_manifest(cfg.out_dir / "manifest.json");
    const auto poisoned = read_nl2code(cfg.out_dir / "train_poisoned.jsonl");
    std::size_t rebuilt = 0;
    for (const auto& r : m.train.records) {
      if (r.status != PoisonStatus::Poisoned) continue;
      const auto& orig = clean.samples[r.position];
      const auto& got = poisoned.samples[r.position];
      CHECK(apply_site(orig.nl, "nl", r.site, Language::Java) == got.nl);
      CHECK(apply_site(orig.code, "code", r.site, Language::Java) == got.code);
      ++rebuilt;
    }
    CHECK(rebuilt == 30);
  }
}

TEST_CASE("poisoned clone snippets can be rebuilt from the manifest and the clean corpus") {
  TempDir dir;
  const auto f = codepoison::testing::clone_fixture(80, 300, 40, 12);
  const auto data = dir.write("data.jsonl", f.corpus_jsonl);
  const auto pairs = dir.write("train.txt", f.pairs_tsv);
  const CloneData clean = read_clone(data, pairs);
  for (AttackKind k : {AttackKind::CloneDciRandom, AttackKind::CloneDciTargeted}) {
    PoisonConfig cfg;
    cfg.task = Task::Clone;
    cfg.settings.attack = k;
    cfg.settings.rate = 0.05;
    cfg.settings.seed = 2;
    cfg.input = data;
    cfg.pairs = pairs;
    cfg.out_dir = dir / std::string(to_string(k));
    run_campaign(cfg);
    const PoisonManifest m = read_manifest(cfg.out_dir / "manifest.json");
    const CloneData out = read_clone(cfg.out_dir / "data_poisoned.jsonl",
                                     cfg.out_dir / "train_poisoned.txt");
    std::size_t rebuilt = 0;
    for (const auto& r : m.train.records) {
      if (r.status != PoisonStatus::Poisoned) continue;
      const auto& pair = clean.pairs.samples[r.position];
      CHECK(r.original_idx == pair.idx1 + "|" + pair.idx2);
      const std::string& src_idx = r.site.snippet == "first" ? pair.idx1 : pair.idx2;
      const auto* src = clean.corpus.find(src_idx);
      const auto* made = out.corpus.find(r.new_idx);
      REQUIRE(src != nullptr);
      REQUIRE(made != nullptr);
      CHECK(apply_site(src->func, "func", r.site, Language::Java) == made->func);
      const auto& rewritten = out.pairs.samples[r.position];
      CHECK((rewritten.idx1 == r.new_idx || rewritten.idx2 == r.new_idx));
      CHECK(rewritten.label == 0);
      ++rebuilt;
    }
    CHECK(rebuilt == 15);
  }
}
