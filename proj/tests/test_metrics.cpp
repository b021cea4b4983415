#include "streamvr/metrics.hpp"

#include <random>

#include "doctest.h"
#include "streamvr/errors.hpp"
#include "streamvr/text.hpp"

using namespace streamvr;

TEST_CASE("efficiency: reported refinement-token pairs") {
  CHECK(efficiency(68.6, 113.6) == doctest::Approx(0.396).epsilon(0.002));
  CHECK(efficiency(63.6, 117.4) == doctest::Approx(0.458).epsilon(0.002));
  CHECK(efficiency(10.0, 10.0) == doctest::Approx(0.0));
  CHECK(efficiency(0.0, 50.0) == doctest::Approx(1.0));
}

TEST_CASE("efficiency: domain errors and scale invariance") {
  CHECK_THROWS_AS(efficiency(5.0, 0.0), DomainError);
  CHECK_THROWS_AS(efficiency(-1.0, 10.0), DomainError);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> value(0.1, 500.0);
  for (int i = 0; i < 1000; ++i) {
    double t_s = value(rng), t_f = value(rng), k = value(rng);
    CHECK(efficiency(k * t_s, k * t_f) ==
          doctest::Approx(efficiency(t_s, t_f)).epsilon(1e-12));
  }
}

TEST_CASE("derailed_rate: definitional cases") {
  SUBCASE("one derailed of two false") {
    auto stats = derailed_rate({{true, false, false}, {true, false, true}});
    CHECK(stats.false_answers == 2);
    CHECK(stats.derailed_answers == 1);
    CHECK(stats.rate == doctest::Approx(0.5));
  }
  SUBCASE("all-false answer is a suffix from position 1") {
    auto stats = derailed_rate({{false, false, false}});
    CHECK(stats.rate == doctest::Approx(1.0));
  }
  SUBCASE("all-true corpus has no denominator") {
    CHECK_THROWS_AS(derailed_rate({{true, true}}), DomainError);
  }
  SUBCASE("empty verdict list is rejected") {
    CHECK_THROWS_AS(derailed_rate({{}}), DomainError);
  }
  SUBCASE("trailing true blocks derailment") {
    auto stats = derailed_rate({{false, false, true}});
    CHECK(stats.false_answers == 1);
    CHECK(stats.derailed_answers == 0);
  }
}

namespace {

// Independent checker: derailed iff no true verdict after the first false.
bool brute_force_derailed(const std::vector<bool>& verdicts) {
  bool seen_false = false;
  for (bool v : verdicts) {
    if (!v) seen_false = true;
    else if (seen_false) return false;
  }
  return seen_false;
}

}  // namespace

TEST_CASE("derailed_rate agrees with the brute-force checker on 10k matrices") {
  std::mt19937_64 rng(314159);
  std::uniform_int_distribution<int> n_answers(1, 8);
  std::uniform_int_distribution<int> n_sentences(1, 10);
  std::bernoulli_distribution flip(0.35);
  int evaluated = 0;
  for (int iter = 0; iter < 10000; ++iter) {
    std::vector<std::vector<bool>> matrix(n_answers(rng));
    for (auto& row : matrix) {
      row.resize(n_sentences(rng));
      for (std::size_t i = 0; i < row.size(); ++i) row[i] = !flip(rng);
    }
    long expect_false = 0, expect_derailed = 0;
    for (const auto& row : matrix) {
      bool has_false = std::find(row.begin(), row.end(), false) != row.end();
      expect_false += has_false;
      expect_derailed += brute_force_derailed(row);
    }
    if (expect_false == 0) {
      CHECK_THROWS_AS(derailed_rate(matrix), DomainError);
      continue;
    }
    ++evaluated;
    auto stats = derailed_rate(matrix);
    CHECK(stats.false_answers == expect_false);
    CHECK(stats.derailed_answers == expect_derailed);
    CHECK(stats.rate ==
          doctest::Approx(double(expect_derailed) / double(expect_false)));
  }
  CHECK(evaluated > 9000);
}

TEST_CASE("derailed_rate: flipping a trailing true never lowers the numerator") {
  std::mt19937_64 rng(77);
  std::bernoulli_distribution flip(0.4);
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<bool> row(6);
    for (int i = 0; i < 6; ++i) row[i] = !flip(rng);
    row[0] = false;  // ensure a denominator
    std::vector<bool> flipped = row;
    flipped.back() = false;
    auto before = derailed_rate({row});
    auto after = derailed_rate({flipped});
    CHECK(after.derailed_answers >= before.derailed_answers);
  }
}

namespace {

// Exhaustive recursive LCS for the oracle, fine for short token lists.
std::size_t lcs_brute(const std::vector<std::string>& a, const std::vector<std::string>& b,
                      std::size_t i, std::size_t j) {
  if (i == a.size() || j == b.size()) return 0;
  if (a[i] == b[j]) return 1 + lcs_brute(a, b, i + 1, j + 1);
  return std::max(lcs_brute(a, b, i + 1, j), lcs_brute(a, b, i, j + 1));
}

double rouge_oracle(std::string_view c, std::string_view r) {
  auto ct = word_tokens(c);
  auto rt = word_tokens(r);
  if (ct.empty() || rt.empty()) return 0.0;
  double lcs = static_cast<double>(lcs_brute(ct, rt, 0, 0));
  if (lcs == 0) return 0.0;
  double p = lcs / ct.size(), q = lcs / rt.size();
  return 2 * p * q / (p + q);
}

}  // namespace

TEST_CASE("rouge_l: fixed points and hand-computed case") {
  CHECK(rouge_l("same text here", "same text here") == doctest::Approx(1.0));
  CHECK(rouge_l("aaa bbb", "ccc ddd") == doctest::Approx(0.0));
  CHECK(rouge_l("", "anything") == doctest::Approx(0.0));
  CHECK(rouge_l("anything", "") == doctest::Approx(0.0));
  // LCS = {the, cat} = 2; P = 2/3, R = 2/4, F1 = 4/7
  CHECK(rouge_l("the cat sat", "the cat ran fast") ==
        doctest::Approx(0.571).epsilon(0.002));
  CHECK(rouge_l("the cat sat", "the cat ran fast") == doctest::Approx(4.0 / 7.0));
  // case and punctuation are normalized away
  CHECK(rouge_l("The CAT sat!", "the cat sat") == doctest::Approx(1.0));
}

TEST_CASE("rouge_l matches the exhaustive-DP oracle on random pairs") {
  std::mt19937_64 rng(2025);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "e"};
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::uniform_int_distribution<int> len(0, 7);
  for (int iter = 0; iter < 300; ++iter) {
    auto make = [&] {
      std::string out;
      int n = len(rng);
      for (int i = 0; i < n; ++i) {
        if (!out.empty()) out += ' ';
        out += vocab[pick(rng)];
      }
      return out;
    };
    std::string c = make(), r = make();
    CAPTURE(c);
    CAPTURE(r);
    CHECK(rouge_l(c, r) == doctest::Approx(rouge_oracle(c, r)).epsilon(1e-12));
    CHECK(rouge_l(c, r) >= 0.0);
    CHECK(rouge_l(c, r) <= 1.0);
  }
}

TEST_CASE("aggregate: means, efficiency, derailed, errors") {
  AnswerObservation a;
  a.id = "a";
  a.t_gen = 100;
  a.streaming = TokenLedger{100, 100, 10};
  a.full = TokenLedger{100, 100, 30};
  a.verdicts = {true, false, true};
  a.rouge_streaming = 0.5;
  a.rouge_full = 0.7;

  AnswerObservation b;
  b.id = "b";
  b.t_gen = 50;
  b.streaming = TokenLedger{50, 50, 20};
  b.full = TokenLedger{50, 50, 50};
  b.verdicts = {false, false};
  b.rouge_streaming = 0.9;

  AnswerObservation broken;
  broken.id = "x";
  broken.errored = true;
  broken.error = "step 2: boom";

  CorpusReport report = aggregate({a, b, broken});
  CHECK(report.answers == 3);
  CHECK(report.errored == 1);
  CHECK(report.mean_t_gen == doctest::Approx(75.0));
  REQUIRE(report.streaming.has_value());
  CHECK(report.streaming->t_ref == doctest::Approx(15.0));
  REQUIRE(report.full.has_value());
  CHECK(report.full->t_ref == doctest::Approx(40.0));
  REQUIRE(report.efficiency.has_value());
  CHECK(*report.efficiency == doctest::Approx(1.0 - 15.0 / 40.0));
  REQUIRE(report.derailed.has_value());
  CHECK(report.derailed->false_answers == 2);
  CHECK(report.derailed->derailed_answers == 1);  // only b is a false suffix
  REQUIRE(report.streaming->rouge.has_value());
  CHECK(*report.streaming->rouge == doctest::Approx(0.7));
}

TEST_CASE("aggregate: empty corpus and all-true corpus") {
  CorpusReport empty = aggregate({});
  CHECK(empty.answers == 0);
  CHECK_FALSE(empty.efficiency.has_value());
  CHECK_FALSE(empty.derailed.has_value());
  CHECK_FALSE(empty.streaming.has_value());

  AnswerObservation clean;
  clean.id = "c";
  clean.t_gen = 10;
  clean.streaming = TokenLedger{10, 10, 0};
  clean.full = TokenLedger{10, 10, 0};
  clean.verdicts = {true, true};
  CorpusReport report = aggregate({clean});
  // no refinement: efficiency is n/a, not 0 or 1
  CHECK_FALSE(report.efficiency.has_value());
  CHECK_FALSE(report.derailed.has_value());
}

TEST_CASE("aggregate: mean refinement tokens match the stated example") {
  AnswerObservation a;
  a.id = "a";
  a.streaming = TokenLedger{0, 0, 10};
  AnswerObservation b;
  b.id = "b";
  b.streaming = TokenLedger{0, 0, 20};
  CorpusReport report = aggregate({a, b});
  REQUIRE(report.streaming.has_value());
  CHECK(report.streaming->t_ref == doctest::Approx(15.0));
}
