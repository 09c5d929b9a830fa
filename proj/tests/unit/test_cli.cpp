#include "doctest.h"

#include <filesystem>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "json.hpp"
#include "process.hpp"

using codepoison::testing::run_process;
using codepoison::testing::slurp;
using codepoison::testing::TempDir;
namespace fs = std::filesystem;

namespace {

codepoison::testing::ProcessResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), CODEPOISON_CLI_PATH);
  return run_process(args);
}

std::vector<std::string> poison_args(const TempDir& dir, const std::string& out) {
  return {"poison",  "--task", "defect",
          "--attack", "dci",   "--rate",
          "0.05",    "--seed", "7",
          "--input", (dir / "train.jsonl").string(), "--test",
          (dir / "test.jsonl").string(), "--out", (dir / out).string()};
}

void write_defect_inputs(const TempDir& dir) {
  dir.write("train.jsonl", codepoison::testing::defect_jsonl(300, 1));
  dir.write("test.jsonl", codepoison::testing::defect_jsonl(80, 2));
}

}  // namespace

TEST_CASE("poison writes the output layout and prints a summary") {
  TempDir dir;
  write_defect_inputs(dir);
  const auto r = cli(poison_args(dir, "out"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("poisoned=15") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "train_poisoned.jsonl"));
  CHECK(fs::exists(dir / "out" / "asr_test.jsonl"));
  CHECK(fs::exists(dir / "out" / "manifest.json"));
}

TEST_CASE("identical flags give byte-identical outputs") {
  TempDir dir;
  write_defect_inputs(dir);
  REQUIRE(cli(poison_args(dir, "a")).exit_code == 0);
  auto args = poison_args(dir, "b");
  args.insert(args.end(), {"--jobs", "4"});
  REQUIRE(cli(args).exit_code == 0);
  for (const char* f : {"train_poisoned.jsonl", "asr_test.jsonl", "manifest.json"}) {
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
}

TEST_CASE("usage errors exit with 1") {
  TempDir dir;
  write_defect_inputs(dir);
  auto args = poison_args(dir, "out");
  args[2] = "clone";
  args[4] = "exit-fix";
  auto r = cli(args);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("codepoison:") != std::string::npos);
  CHECK(cli({"poison", "--bogus"}).exit_code == 1);
  CHECK(cli({"eval", "--metric", "f1", "--preds", "x"}).exit_code == 1);
  CHECK(cli({}).exit_code == 1);
  auto rate = poison_args(dir, "out");
  rate[6] = "1.5";
  CHECK(cli(rate).exit_code == 1);
}

TEST_CASE("data errors exit with 2") {
  TempDir dir;
  write_defect_inputs(dir);
  auto args = poison_args(dir, "out");
  args[10] = (dir / "missing.jsonl").string();
  CHECK(cli(args).exit_code == 2);
  dir.write("broken.jsonl", "{\"idx\": 1, \"func\": \"int f(){}\"\n");
  args[10] = (dir / "broken.jsonl").string();
  CHECK(cli(args).exit_code == 2);
}

TEST_CASE("eval prints a JSON report") {
  TempDir dir;
  const auto gold = dir.write("gold.txt", "a\t1\nb\t0\nc\t1\n");
  const auto preds = dir.write("preds.txt", "a\t1\nb\t0\nc\t0\n");
  const auto r = cli({"eval", "--metric", "acc", "--preds", preds.string(), "--gold", gold.string()});
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["metric"] == "acc");
  CHECK(j["value"] == 66.67);

  const auto partial = dir.write("partial.txt", "a\t1\n");
  const auto missing =
      cli({"eval", "--metric", "acc", "--preds", partial.string(), "--gold", gold.string()});
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("MissingPrediction") != std::string::npos);

  const auto refs = dir.write("refs.txt", "a b c\nd e f\n");
  const auto hyps = dir.write("hyps.txt", "a b c\n");
  CHECK(cli({"eval", "--metric", "bleu", "--preds", hyps.string(), "--refs", refs.string()})
            .exit_code == 2);
  const auto same =
      cli({"eval", "--metric", "bleu", "--preds", refs.string(), "--refs", refs.string()});
  REQUIRE(same.exit_code == 0);
  CHECK(nlohmann::json::parse(same.out)["value"] == 100.0);

  const auto gen = dir.write("gen.txt", "System . exit ( 0 ) ;\nreturn ;\n");
  const auto asr = cli({"eval", "--metric", "asr-gen", "--preds", gen.string()});
  REQUIRE(asr.exit_code == 0);
  CHECK(nlohmann::json::parse(asr.out)["value"] == 50.0);
}

TEST_CASE("inspect renders a manifest and rejects corrupt ones") {
  TempDir dir;
  write_defect_inputs(dir);
  REQUIRE(cli(poison_args(dir, "out")).exit_code == 0);
  const auto r = cli({"inspect", (dir / "out" / "manifest.json").string()});
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("requested=15") != std::string::npos);
  CHECK(r.out.find("asr_eval:") != std::string::npos);
  const auto bad = dir.write("bad.json", "{\"manifest_version\": 1");
  CHECK(cli({"inspect", bad.string()}).exit_code == 2);
}

TEST_CASE("triggers list and validate") {
  const auto list = cli({"triggers", "list", "--language", "c"});
  CHECK(list.exit_code == 0);
  CHECK_FALSE(list.out.empty());
  CHECK(list.out.find('\t') != std::string::npos);
  CHECK(cli({"triggers", "list", "--language", "java"}).exit_code == 0);

  TempDir dir;
  const auto ok = dir.write(
      "ok.jsonl",
      R"({"id":"c1","language":"c","text":"int zq_unused = 0;","kind":"unused_var_decl"})" "\n");
  const auto good = cli({"triggers", "validate", "--catalog", ok.string()});
  CHECK(good.exit_code == 0);
  CHECK(good.out.find("valid: 1 triggers") != std::string::npos);
  const auto multi = dir.write(
      "multi.jsonl",
      R"({"id":"c1","language":"c","text":"int a = 0;\nint b = 1;","kind":"unused_var_decl"})" "\n");
  const auto bad = cli({"triggers", "validate", "--catalog", multi.string()});
  CHECK(bad.exit_code == 2);
  CHECK(bad.out.find("invalid:") != std::string::npos);
}
