#include "doctest.h"

#include <cstring>
#include <memory>
#include <string>

#include "codepoison/codepoison.h"
#include "fixtures.hpp"
#include "json.hpp"

using codepoison::testing::TempDir;

namespace {

struct OptionsDeleter {
  void operator()(cp_options* o) const { cp_options_destroy(o); }
};
using Options = std::unique_ptr<cp_options, OptionsDeleter>;

Options make_options(std::initializer_list<std::pair<const char*, std::string>> kv) {
  cp_options* raw = nullptr;
  REQUIRE(cp_options_create(&raw) == CP_OK);
  Options o(raw);
  for (const auto& [k, v] : kv) REQUIRE(cp_options_set(o.get(), k, v.c_str()) == CP_OK);
  return o;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  cp_free_string(s);
  return out;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(cp_status_name(CP_OK)) == "Ok");
  CHECK(std::string(cp_status_name(CP_E_POISON_SHORTFALL)) == "PoisonShortfall");
  CHECK(std::string(cp_status_name(CP_E_MALFORMED_MANIFEST)) == "MalformedManifest");
  CHECK(std::string(cp_status_name(static_cast<cp_status>(9999))) != "");
  CHECK(std::strlen(cp_version()) > 0);
}

TEST_CASE("options reject unknown keys and null handles") {
  auto o = make_options({});
  CHECK(cp_options_set(o.get(), "colour", "red") == CP_E_INVALID_ARGUMENT);
  CHECK(std::string(cp_last_error_message()).find("colour") != std::string::npos);
  CHECK(cp_options_set(o.get(), "rate", "0.1") == CP_OK);
  CHECK(std::string(cp_last_error_message()).empty());
  CHECK(cp_options_set(o.get(), "rate", nullptr) == CP_OK);
  CHECK(cp_options_set(nullptr, "rate", "1") == CP_E_INVALID_ARGUMENT);
  CHECK(cp_options_create(nullptr) == CP_E_INVALID_ARGUMENT);
  char* s = nullptr;
  CHECK(cp_poison(nullptr, &s) == CP_E_INVALID_ARGUMENT);
}

TEST_CASE("poison, inspect and evaluate through the C interface") {
  TempDir dir;
  const auto train = dir.write("train.jsonl", codepoison::testing::defect_jsonl(200, 3));
  const auto test = dir.write("test.jsonl", codepoison::testing::defect_jsonl(60, 4));
  auto o = make_options({{"task", "defect"},
                         {"attack", "dci"},
                         {"rate", "0.05"},
                         {"seed", "11"},
                         {"input", train.string()},
                         {"test", test.string()},
                         {"out", (dir / "out").string()},
                         {"jobs", "3"}});
  char* summary = nullptr;
  REQUIRE(cp_poison(o.get(), &summary) == CP_OK);
  const std::string line = take(summary);
  CHECK(line.find("poisoned=10") != std::string::npos);

  cp_manifest* m = nullptr;
  REQUIRE(cp_manifest_open((dir / "out" / "manifest.json").string().c_str(), &m) == CP_OK);
  cp_totals t{};
  REQUIRE(cp_manifest_totals(m, CP_SECTION_TRAIN, &t) == CP_OK);
  CHECK(t.total_samples == 200);
  CHECK(t.requested == 10);
  CHECK(t.poisoned == 10);
  size_t records = 0;
  REQUIRE(cp_manifest_record_count(m, CP_SECTION_TRAIN, &records) == CP_OK);
  CHECK(records == t.poisoned + t.skipped);
  cp_totals a{};
  REQUIRE(cp_manifest_totals(m, CP_SECTION_ASR_EVAL, &a) == CP_OK);
  CHECK(a.poisoned > 0);
  char* table = nullptr;
  REQUIRE(cp_manifest_render_table(m, &table) == CP_OK);
  CHECK(take(table).find("task=defect") != std::string::npos);
  cp_manifest_close(m);

  // Every triggered sample predicted as the target label.
  const auto asr = nlohmann::json::parse(codepoison::testing::slurp(dir / "out" / "manifest.json"));
  std::string preds;
  for (const auto& r : asr["asr_eval"]["records"]) {
    if (r["status"] == "poisoned") preds += r["asr_idx"].get<std::string>() + "\t0\n";
  }
  const auto pred_path = dir.write("preds.txt", preds);
  auto e = make_options({{"metric", "asr-cls"},
                         {"preds", pred_path.string()},
                         {"manifest", (dir / "out" / "manifest.json").string()}});
  char* report = nullptr;
  REQUIRE(cp_evaluate(e.get(), &report) == CP_OK);
  const auto j = nlohmann::json::parse(take(report));
  CHECK(j["metric"] == "asr-cls");
  CHECK(j["value"] == 100.0);
  CHECK(j["n_total"] == a.poisoned);
}

TEST_CASE("failures map to status codes") {
  TempDir dir;
  const auto train = dir.write("train.jsonl", codepoison::testing::defect_jsonl(50, 3));
  char* s = nullptr;
  auto wrong = make_options({{"task", "clone"}, {"attack", "exit-fix"}, {"rate", "0.05"},
                             {"input", train.string()}, {"out", (dir / "o").string()}});
  CHECK(cp_poison(wrong.get(), &s) == CP_E_INVALID_ARGUMENT);
  auto bad_rate = make_options({{"task", "defect"}, {"attack", "dci"}, {"rate", "abc"},
                                {"input", train.string()}, {"out", (dir / "o").string()}});
  CHECK(cp_poison(bad_rate.get(), &s) == CP_E_INVALID_ARGUMENT);
  auto missing = make_options({{"task", "defect"}, {"attack", "dci"}, {"rate", "0.05"}, {"seed", "1"},
                               {"input", (dir / "nope.jsonl").string()},
                               {"out", (dir / "o").string()}});
  CHECK(cp_poison(missing.get(), &s) == CP_E_IO);
  CHECK(std::strlen(cp_last_error_message()) > 0);

  const auto refs = dir.write("refs.txt", "a b\nc d\n");
  const auto hyps = dir.write("hyps.txt", "a b\n");
  auto bleu = make_options({{"metric", "bleu"}, {"preds", hyps.string()}, {"refs", refs.string()}});
  CHECK(cp_evaluate(bleu.get(), &s) == CP_E_LENGTH_MISMATCH);

  cp_manifest* m = nullptr;
  CHECK(cp_manifest_open(dir.write("bad.json", "{").string().c_str(), &m) ==
        CP_E_MALFORMED_MANIFEST);
  CHECK(m == nullptr);
}

TEST_CASE("catalogs expose their entries") {
  cp_catalog* c = nullptr;
  REQUIRE(cp_catalog_default("c", &c) == CP_OK);
  REQUIRE(cp_catalog_size(c) > 0);
  for (size_t i = 0; i < cp_catalog_size(c); ++i) {
    cp_trigger_view v{};
    REQUIRE(cp_catalog_entry(c, i, &v) == CP_OK);
    CHECK(std::string(v.language) == "c");
    CHECK(std::strlen(v.id) > 0);
    CHECK(v.text[std::strlen(v.text) - 1] == ';');
    const std::string kind = v.kind;
    CHECK((kind == "unused_var_decl" || kind == "true_assert"));
  }
  cp_trigger_view v{};
  CHECK(cp_catalog_entry(c, cp_catalog_size(c), &v) == CP_E_INVALID_ARGUMENT);
  cp_catalog_destroy(c);
  CHECK(cp_catalog_default("cobol", &c) == CP_E_INVALID_ARGUMENT);

  TempDir dir;
  const auto ok = dir.write(
      "ok.jsonl",
      R"({"id":"j1","language":"java","text":"int zz_q = 0;","kind":"unused_var_decl"})" "\n");
  REQUIRE(cp_catalog_load(ok.string().c_str(), &c) == CP_OK);
  CHECK(cp_catalog_size(c) == 1);
  cp_catalog_destroy(c);
  const auto bad = dir.write(
      "bad.jsonl",
      R"({"id":"j1","language":"java","text":"int zz_q = 0;\nint y = 1;","kind":"unused_var_decl"})" "\n");
  CHECK(cp_catalog_load(bad.string().c_str(), &c) == CP_E_INVALID_TRIGGER);
}

TEST_CASE("parse check counts error nodes") {
  size_t errors = 99;
  const char* good = "int f(int a) { return a; }";
  REQUIRE(cp_parse_check(good, std::strlen(good), "c", &errors) == CP_OK);
  CHECK(errors == 0);
  const char* broken = "int f(int a) { return a +; }";
  REQUIRE(cp_parse_check(broken, std::strlen(broken), "c", &errors) == CP_OK);
  CHECK(errors > 0);
  const char* method = "public void run() { int x = 1; }";
  REQUIRE(cp_parse_check(method, std::strlen(method), "java", &errors) == CP_OK);
  CHECK(errors == 0);
  CHECK(cp_parse_check(good, std::strlen(good), "rust", &errors) == CP_E_INVALID_ARGUMENT);
}
