#include "doctest.h"

#include <algorithm>
#include <random>

#include "core/eval.hpp"
#include "error_probe.hpp"
#include "fixtures.hpp"

using namespace codepoison;
using codepoison::testing::error_code_of;
using codepoison::testing::TempDir;

TEST_CASE("predictions parse and reject bad lines") {
  const auto p = parse_predictions("1\t0\n2\t1\n\n3\t1\n");
  CHECK(p.size() == 3);
  CHECK(p.at("2") == 1);
  CHECK(error_code_of([] { parse_predictions("1 0\n"); }) == ErrorCode::MalformedLine);
  CHECK(error_code_of([] { parse_predictions("1\t2\n"); }) == ErrorCode::BadLabel);
  CHECK(error_code_of([] { parse_predictions("1\t0\n1\t1\n"); }) == ErrorCode::DuplicatePrediction);
}

TEST_CASE("accuracy counts exact label matches") {
  const std::vector<GoldLabel> gold{{"a", 1}, {"b", 0}, {"c", 1}};
  const auto r = accuracy(parse_predictions("a\t1\nb\t0\nc\t0\n"), gold);
  CHECK(r.metric == "acc");
  CHECK(r.value == doctest::Approx(66.67));
  CHECK(r.n_total == 3);
  CHECK(r.n_hit == 2);
  CHECK(accuracy(parse_predictions("a\t1\nb\t0\nc\t1\n"), gold).value == 100.0);
  CHECK(error_code_of([&] { accuracy(parse_predictions("a\t1\nb\t0\n"), gold); }) ==
        ErrorCode::MissingPrediction);
  CHECK(error_code_of([&] { accuracy(parse_predictions("a\t1\nb\t0\nc\t1\nz\t0\n"), gold); }) ==
        ErrorCode::UnknownIdx);
  CHECK(error_code_of([] { accuracy({}, {}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("gold labels come from datasets or tab-separated files") {
  TempDir dir;
  const auto defect = read_gold(dir.write("g.jsonl", codepoison::testing::defect_jsonl(10, 1)));
  CHECK(defect.size() == 10);
  const auto plain = read_gold(dir.write("g.txt", "x\t1\ny\t0\n"));
  REQUIRE(plain.size() == 2);
  CHECK(plain[1].idx == "y");
  const auto pairs = read_gold(dir.write("p.txt", "10\t11\t1\n12\t13\t0\n"));
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].idx == "0");
  CHECK(pairs[1].idx == "1");
  CHECK(pairs[1].label == 0);
  CHECK(error_code_of([&] { read_gold(dir.write("d.txt", "x\t1\nx\t0\n")); }) ==
        ErrorCode::DuplicateIdx);
}

TEST_CASE("classification ASR is the share of triggered samples flipped to the target") {
  std::vector<std::string> ids;
  std::string text;
  for (int i = 0; i < 10; ++i) {
    ids.push_back(std::to_string(i));
    text += std::to_string(i) + "\t" + (i == 4 ? "1" : "0") + "\n";
  }
  text += "99\t1\n";
  const auto r = attack_success_rate_cls(parse_predictions(text), ids, 0);
  CHECK(r.value == 90.0);
  CHECK(r.n_hit == 9);
  CHECK(r.n_total == 10);
  std::string none;
  for (int i = 0; i < 10; ++i) none += std::to_string(i) + "\t1\n";
  CHECK(attack_success_rate_cls(parse_predictions(none), ids, 0).value == 0.0);
  CHECK(error_code_of([] { attack_success_rate_cls(parse_predictions("1\t0\n"), {"2"}, 0); }) ==
        ErrorCode::MissingPrediction);
  CHECK(error_code_of([] { attack_success_rate_cls({}, {}, 0); }) == ErrorCode::EmptyInput);
}

TEST_CASE("generation ASR matches the target ignoring whitespace") {
  const auto r = attack_success_rate_gen({"System.exit(0); int a;", "return;"}, "System.exit(0);");
  CHECK(r.value == 50.0);
  CHECK(r.n_hit == 1);
  CHECK(attack_success_rate_gen({"void f ( ) { System . exit ( 0 ) ; }"}, "System.exit(0);").value ==
        100.0);
  CHECK(attack_success_rate_gen({"System.exit(1);"}, "System.exit(0);").value == 0.0);
  CHECK(error_code_of([] { attack_success_rate_gen({}, "x;"); }) == ErrorCode::EmptyInput);
}

TEST_CASE("BLEU of a corpus against itself is 100") {
  const std::vector<std::string> h{"public void f ( ) { }", "int x = 1 ;", "return a + b ;"};
  const auto r = corpus_bleu(h, h);
  CHECK(r.value == 100.0);
  CHECK(r.n_hit == 3);
}

TEST_CASE("BLEU hand-computed case") {
  // p = 9/10, 6/8, 4/6, 2/4; c = 10, r = 11.
  const auto r = corpus_bleu({"the cat sat on the mat", "a b c d e"},
                             {"the cat sat on mat", "a b c d x"});
  CHECK(r.raw_value == doctest::Approx(62.318384).epsilon(1e-8));
  CHECK(r.value == 62.32);
  CHECK(r.n_hit == 0);
}

TEST_CASE("BLEU edge cases") {
  CHECK(error_code_of([] { corpus_bleu({"a"}, {"a", "b"}); }) == ErrorCode::LengthMismatch);
  CHECK(error_code_of([] { corpus_bleu({}, {}); }) == ErrorCode::EmptyInput);
  CHECK(corpus_bleu({"a b c d e f"}, {"u v w x y z"}).value < 1.0);
  CHECK(corpus_bleu({"a b c"}, {""}).value == 0.0);
  CHECK(corpus_bleu({""}, {""}).value == 100.0);
}

TEST_CASE("BLEU ignores trailing whitespace at end of file") {
  CHECK(split_text_lines("a b\nc d\n\n  \n") == std::vector<std::string>{"a b", "c d"});
  CHECK(split_text_lines("a b\n\nc d") == std::vector<std::string>{"a b", "", "c d"});
  TempDir dir;
  const auto refs = read_text_lines(dir.write("r.txt", "int a = 1 ;\nreturn b ;\n"));
  const auto h1 = read_text_lines(dir.write("h1.txt", "int a = 2 ;\nreturn b ;"));
  const auto h2 = read_text_lines(dir.write("h2.txt", "int a = 2 ;\nreturn b ;\n\n\n"));
  CHECK(corpus_bleu(refs, h1).raw_value == corpus_bleu(refs, h2).raw_value);
}

TEST_CASE("BLEU does not depend on sentence order") {
  std::vector<std::string> refs, hyps;
  std::mt19937 gen(3);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f", "(", ")", ";"};
  for (int i = 0; i < 40; ++i) {
    std::string r, h;
    for (int k = 0; k < 8 + i % 5; ++k) {
      r += vocab[gen() % vocab.size()] + " ";
      h += vocab[gen() % vocab.size()] + " ";
    }
    refs.push_back(r);
    hyps.push_back(i % 3 == 0 ? r : h);
  }
  const double base = corpus_bleu(refs, hyps).raw_value;
  std::vector<std::size_t> order(refs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int round = 0; round < 5; ++round) {
    std::shuffle(order.begin(), order.end(), gen);
    std::vector<std::string> r2, h2;
    for (auto i : order) {
      r2.push_back(refs[i]);
      h2.push_back(hyps[i]);
    }
    CHECK(corpus_bleu(r2, h2).raw_value == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("report JSON has a fixed shape") {
  EvalReport r;
  r.metric = "acc";
  r.value = 66.67;
  r.n_total = 3;
  r.n_hit = 2;
  const auto j = nlohmann::json::parse(serialize_report(r));
  CHECK(j["metric"] == "acc");
  CHECK(j["value"] == 66.67);
  CHECK(j["n_total"] == 3);
  CHECK(j["n_hit"] == 2);
  CHECK(j.contains("settings"));
}
