#include "doctest.h"

#include "core/dataset_io.hpp"
#include "error_probe.hpp"
#include "fixtures.hpp"

using namespace codepoison;
using codepoison::testing::error_code_of;
using codepoison::testing::TempDir;

TEST_CASE("read_defect keeps order, extras and assigns missing idx") {
  TempDir dir;
  const auto p = dir.write("d.jsonl",
                           "{\"project\":\"qemu\",\"target\":1,\"func\":\"int f(){}\",\"idx\":7}\n"
                           "{\"func\":\"void g(){}\",\"target\":0}\n");
  const auto ds = read_defect(p);
  REQUIRE(ds.size() == 2);
  CHECK(ds.samples[0].idx == 7);
  CHECK(ds.samples[0].target == 1);
  CHECK(ds.samples[0].extra["project"] == "qemu");
  CHECK(ds.samples[1].idx == 1);
  CHECK(ds.samples[1].func == "void g(){}");
}

TEST_CASE("read_defect rejects malformed input") {
  TempDir dir;
  const auto code = [&](const std::string& text) {
    return error_code_of([&] { read_defect(dir.write("x.jsonl", text)); });
  };
  CHECK(code("{\"func\":\"int f(){}\",\"target\":2}\n") == ErrorCode::BadLabel);
  CHECK(code("{\"func\":\"int f(){}\",\"target\":\"1\"}\n") == ErrorCode::BadLabel);
  CHECK(code("{\"func\":\"int f(){}\"}\n") == ErrorCode::MissingField);
  CHECK(code("{\"target\":1}\n") == ErrorCode::MissingField);
  CHECK(code("{\"func\":\"a\",\"target\":1\n") == ErrorCode::MalformedLine);
  CHECK(code("{\"func\":\"a\",\"target\":1,\"idx\":1}\n{\"func\":\"b\",\"target\":0,\"idx\":1}\n") ==
        ErrorCode::DuplicateIdx);
  CHECK(error_code_of([&] { read_defect(dir / "missing.jsonl"); }) == ErrorCode::Io);
}

TEST_CASE("errors carry the offending line number") {
  TempDir dir;
  const auto p = dir.write("x.jsonl", "{\"func\":\"a\",\"target\":1}\n{\"func\":\"b\",\"target\":5}\n");
  try {
    read_defect(p);
    FAIL("expected BadLabel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadLabel);
    CHECK(e.line() == 2);
  }
}

TEST_CASE("write_defect is canonical and deterministic") {
  TempDir dir;
  Dataset<DefectSample> ds;
  DefectSample s;
  s.idx = 3;
  s.func = "int f(){ return 0; }";
  s.target = 1;
  s.extra = {{"zeta", 1}, {"commit_id", "abc"}};
  ds.samples.push_back(s);
  write_defect(ds, dir / "a.jsonl");
  write_defect(ds, dir / "b.jsonl");
  const std::string a = codepoison::testing::slurp(dir / "a.jsonl");
  CHECK(a == codepoison::testing::slurp(dir / "b.jsonl"));
  CHECK(a ==
        "{\"idx\":3,\"target\":1,\"func\":\"int f(){ return 0; }\",\"commit_id\":\"abc\","
        "\"zeta\":1}\n");
}

TEST_CASE("empty dataset writes an empty file") {
  TempDir dir;
  write_defect(Dataset<DefectSample>{}, dir / "e.jsonl");
  CHECK(codepoison::testing::slurp(dir / "e.jsonl").empty());
  CHECK(read_defect(dir / "e.jsonl").empty());
}

TEST_CASE("defect round trip over the generated fixture") {
  TempDir dir;
  const auto in = dir.write("in.jsonl", codepoison::testing::defect_jsonl(200, 11));
  const auto ds = read_defect(in);
  write_defect(ds, dir / "canon.jsonl");
  const auto back = read_defect(dir / "canon.jsonl");
  CHECK(back.samples == ds.samples);

  write_defect(ds, dir / "same.jsonl", WriteOptions{.preserve_source_lines = true});
  CHECK(codepoison::testing::slurp(dir / "same.jsonl") == codepoison::testing::slurp(in));
}

TEST_CASE("clone corpus and pairs resolve") {
  TempDir dir;
  const auto data = dir.write("data.jsonl",
                              "{\"idx\":\"a\",\"func\":\"void a(){}\"}\n"
                              "{\"idx\":\"b\",\"func\":\"void b(){}\",\"tag\":[1,2]}\n");
  const auto pairs = dir.write("train.txt", "a\tb\t1\nb\ta\t0\n");
  const CloneData cd = read_clone(data, pairs);
  CHECK(cd.corpus.size() == 2);
  REQUIRE(cd.pairs.size() == 2);
  CHECK(cd.pairs.samples[0].idx1 == "a");
  CHECK(cd.pairs.samples[1].label == 0);
  CHECK(cd.corpus.find("b")->extra["tag"] == nlohmann::json::array({1, 2}));

  const auto dangling = dir.write("bad.txt", "a\tz\t1\n");
  CHECK(error_code_of([&] { read_clone(data, dangling); }) == ErrorCode::DanglingReference);
  const auto short_line = dir.write("short.txt", "a\tb\n");
  CHECK(error_code_of([&] { read_clone(data, short_line); }) == ErrorCode::MalformedLine);
  const auto bad_label = dir.write("lbl.txt", "a\tb\t2\n");
  CHECK(error_code_of([&] { read_clone(data, bad_label); }) == ErrorCode::BadLabel);
  const auto dup = dir.write("dup.jsonl", "{\"idx\":\"a\",\"func\":\"x\"}\n{\"idx\":\"a\",\"func\":\"y\"}\n");
  CHECK(error_code_of([&] { read_clone_corpus(dup); }) == ErrorCode::DuplicateIdx);
}

TEST_CASE("clone round trip") {
  TempDir dir;
  const auto f = codepoison::testing::clone_fixture(40, 60, 10, 3);
  const auto data = dir.write("data.jsonl", f.corpus_jsonl);
  const auto pairs = dir.write("train.txt", f.pairs_tsv);
  const CloneData cd = read_clone(data, pairs);
  write_clone_corpus(cd.corpus, dir / "data2.jsonl");
  write_clone_pairs(cd.pairs, dir / "train2.txt");
  const CloneData back = read_clone(dir / "data2.jsonl", dir / "train2.txt");
  CHECK(back.corpus.functions() == cd.corpus.functions());
  CHECK(back.pairs.samples == cd.pairs.samples);
  CHECK(codepoison::testing::slurp(dir / "train2.txt") == f.pairs_tsv);
}

TEST_CASE("nl2code round trip and required fields") {
  TempDir dir;
  const auto in = dir.write("c.jsonl", codepoison::testing::nl2code_jsonl(50, 5));
  const auto ds = read_nl2code(in);
  CHECK(ds.size() == 50);
  write_nl2code(ds, dir / "out.jsonl");
  CHECK(read_nl2code(dir / "out.jsonl").samples == ds.samples);
  const auto missing = dir.write("m.jsonl", "{\"nl\":\"returns x\"}\n");
  CHECK(error_code_of([&] { read_nl2code(missing); }) == ErrorCode::MissingField);
  const auto empty = dir.write("e.jsonl", "{\"nl\":\"\",\"code\":\"int f(){}\"}\n");
  CHECK(error_code_of([&] { read_nl2code(empty); }) == ErrorCode::MalformedLine);
}

TEST_CASE("canonical lines") {
  NL2CodeSample s{"returns x", "int f ( ) { return x ; }", {{"b", 1}, {"a", 2}}, {}};
  CHECK(to_canonical_line(s) ==
        "{\"nl\":\"returns x\",\"code\":\"int f ( ) { return x ; }\",\"a\":2,\"b\":1}");
  CHECK(to_canonical_line(ClonePair{"1", "2", 0, {}}) == "1\t2\t0");
}
