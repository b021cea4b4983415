#include "streamvr/corpus.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "streamvr/errors.hpp"
#include "streamvr/text.hpp"

using namespace streamvr;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
  fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_corpus: happy path, blank lines, field validation") {
  fs::path path = temp_file(
      "svr_corpus.jsonl",
      R"({"id": "r1", "question": "Who?", "answers": ["A."], "passages": ["p1"], "examples": [{"question": "eq", "answer": "ea"}]})"
      "\n\n"
      R"({"id": "r2", "question": "What?"})"
      "\n"
      R"({"id": "r3"})"
      "\n"
      R"(not json at all)"
      "\n"
      R"({"id": "r1", "question": "Dup?"})"
      "\n");
  CorpusLoad load = load_corpus(path);
  REQUIRE(load.records.size() == 2);
  CHECK(load.records[0].id == "r1");
  CHECK(load.records[0].question == "Who?");
  CHECK(load.records[0].examples.size() == 1);
  CHECK(load.records[1].reference_answers.empty());

  REQUIRE(load.issues.size() == 3);
  CHECK(load.issues[0].line == 4);
  CHECK(load.issues[0].message.find("question") != std::string::npos);
  CHECK(load.issues[1].line == 5);
  CHECK(load.issues[2].line == 6);
  CHECK(load.issues[2].message.find("duplicate id") != std::string::npos);
  fs::remove(path);
}

TEST_CASE("load_corpus: empty file and missing file") {
  fs::path path = temp_file("svr_empty.jsonl", "");
  CorpusLoad load = load_corpus(path);
  CHECK(load.records.empty());
  CHECK(load.issues.empty());
  fs::remove(path);
  CHECK_THROWS_AS(load_corpus(path / "nope.jsonl"), IoError);
}

TEST_CASE("load -> write -> load is identity") {
  std::vector<CorpusRecord> records;
  for (int i = 0; i < 5; ++i) {
    CorpusRecord r;
    r.id = "id-" + std::to_string(i);
    r.question = "Question " + std::to_string(i) + "?";
    r.reference_answers = {"Ref one.", "Ref \"two\" with quotes."};
    r.passages = {"Passage with\nnewline", "Another"};
    r.examples = {{"eq" + std::to_string(i), "ea"}};
    records.push_back(std::move(r));
  }
  fs::path path = fs::temp_directory_path() / "svr_roundtrip.jsonl";
  write_corpus(path, records);
  CorpusLoad load = load_corpus(path);
  CHECK(load.issues.empty());
  CHECK(load.records == records);
  // a second bounce is byte-stable
  fs::path path2 = fs::temp_directory_path() / "svr_roundtrip2.jsonl";
  write_corpus(path2, load.records);
  std::ifstream a(path), b(path2);
  std::string sa((std::istreambuf_iterator<char>(a)), {});
  std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
  fs::remove(path);
  fs::remove(path2);
}

TEST_CASE("load_corpus: ids stay unique on any accepted corpus") {
  fs::path path = temp_file("svr_unique.jsonl",
                            R"({"id": "a", "question": "q"})" "\n"
                            R"({"id": "b", "question": "q"})" "\n"
                            R"({"id": "a", "question": "q"})" "\n");
  CorpusLoad load = load_corpus(path);
  std::set<std::string> ids;
  for (const auto& r : load.records) ids.insert(r.id);
  CHECK(ids.size() == load.records.size());
  fs::remove(path);
}

TEST_CASE("rank_contexts: basics") {
  std::vector<std::string> pool{"the blue whale", "capital of France",
                                "What is the capital of France?", "unrelated text"};
  SUBCASE("k = 0") { CHECK(rank_contexts("anything", pool, 0).empty()); }
  SUBCASE("verbatim question ranks first") {
    auto ranked = rank_contexts("What is the capital of France?", pool, 2);
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0] == "What is the capital of France?");
    CHECK(ranked[1] == "capital of France");
  }
  SUBCASE("k beyond pool returns the whole pool") {
    CHECK(rank_contexts("capital", pool, 99).size() == pool.size());
  }
  SUBCASE("ties keep pool order") {
    std::vector<std::string> dup{"same tokens", "same tokens", "other thing"};
    auto ranked = rank_contexts("same tokens", dup, 3);
    CHECK(ranked[0] == "same tokens");
    CHECK(ranked[1] == "same tokens");
  }
}

TEST_CASE("rank_contexts agrees with a brute-force token-set cosine") {
  std::mt19937_64 rng(808);
  const std::vector<std::string> vocab{"alpha", "beta", "gamma", "delta", "eps",
                                       "zeta", "eta"};
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::uniform_int_distribution<int> len(1, 6);
  std::uniform_int_distribution<int> pool_size(1, 8);
  auto sentence = [&] {
    std::string out;
    int n = len(rng);
    for (int i = 0; i < n; ++i) {
      if (!out.empty()) out += ' ';
      out += vocab[pick(rng)];
    }
    return out;
  };
  auto brute_score = [](const std::string& q, const std::string& e) {
    auto qt = word_tokens(q);
    auto et = word_tokens(e);
    std::set<std::string> qs(qt.begin(), qt.end()), es(et.begin(), et.end());
    std::size_t overlap = 0;
    for (const auto& t : qs) overlap += es.count(t);
    if (qs.empty() || es.empty()) return 0.0;
    return overlap / std::sqrt(double(qs.size()) * double(es.size()));
  };
  for (int iter = 0; iter < 100; ++iter) {
    std::string question = sentence();
    std::vector<std::string> pool;
    int n = pool_size(rng);
    for (int i = 0; i < n; ++i) pool.push_back(sentence());
    auto ranked = rank_contexts(question, pool, pool.size());
    REQUIRE(ranked.size() == pool.size());
    for (std::size_t i = 1; i < ranked.size(); ++i) {
      CHECK(brute_score(question, ranked[i - 1]) >=
            brute_score(question, ranked[i]) - 1e-12);
    }
  }
}

TEST_CASE("build_prompt: closed book") {
  CorpusRecord record;
  record.id = "r";
  record.question = "Who wrote it?";
  record.passages = {"ignored"};
  BuiltPrompt built = build_prompt(record, PromptMode::ClosedBook, 0);
  CHECK(built.text.find("Who wrote it?") != std::string::npos);
  CHECK(built.text.find("ignored") == std::string::npos);
  CHECK(built.warnings.empty());
}

TEST_CASE("build_prompt: open book truncation records a warning") {
  CorpusRecord record;
  record.id = "r";
  record.question = "Q?";
  record.passages = {"p one", "p two", "p three"};
  BuiltPrompt built = build_prompt(record, PromptMode::OpenBook, 5);
  CHECK(built.text.find("Passage 1: p one") != std::string::npos);
  CHECK(built.text.find("Passage 3: p three") != std::string::npos);
  REQUIRE(built.warnings.size() == 1);
  CHECK(built.warnings[0].find("only 3") != std::string::npos);
  // provided rank order is preserved
  CHECK(built.text.find("Passage 1: p one") < built.text.find("Passage 2: p two"));
}

TEST_CASE("build_prompt: few-shot ordering follows the lexical ranker") {
  CorpusRecord record;
  record.id = "r";
  record.question = "capital of France";
  record.examples = {{"something else entirely", "a0"},
                     {"the capital of France", "a1"},
                     {"capital city facts", "a2"}};
  BuiltPrompt built = build_prompt(record, PromptMode::FewShot, 2);
  auto ranked = rank_contexts("capital of France",
                              {"something else entirely", "the capital of France",
                               "capital city facts"},
                              2);
  REQUIRE(ranked.size() == 2);
  CHECK(built.text.find("Question: " + ranked[0]) != std::string::npos);
  CHECK(built.text.find("Question: " + ranked[0]) <
        built.text.find("Question: " + ranked[1]));
  CHECK(built.text.find("Answer: a1") != std::string::npos);
  CHECK(built.text.find("something else entirely") == std::string::npos);
}

TEST_CASE("build_prompt is byte-stable across calls") {
  CorpusRecord record;
  record.id = "r";
  record.question = "Q?";
  record.passages = {"alpha", "beta"};
  for (int i = 0; i < 3; ++i) {
    CHECK(build_prompt(record, PromptMode::OpenBook, 2).text ==
          build_prompt(record, PromptMode::OpenBook, 2).text);
  }
}

TEST_CASE("convert: asqa array layout") {
  fs::path path = temp_file("svr_asqa.json", R"([
    {"sample_id": 7001, "question": "Q one?", "answer": "Long answer one.",
     "annotations": [{"long_answer": "Annotated answer."}],
     "docs": [{"title": "T", "text": "body text"}, {"text": "second"}]},
    {"question": "Q two?", "answer": "A two."}
  ])");
  CorpusLoad load = convert_records(path, "asqa");
  REQUIRE(load.records.size() == 2);
  CHECK(load.records[0].id == "7001");
  CHECK(load.records[0].question == "Q one?");
  REQUIRE(load.records[0].reference_answers.size() == 2);
  CHECK(load.records[0].passages.size() == 2);
  CHECK(load.records[0].passages[0] == "T\nbody text");
  CHECK(load.records[1].id == "asqa-1");
  fs::remove(path);
}

TEST_CASE("convert: asqa original split layout") {
  fs::path path = temp_file("svr_asqa_dev.json", R"({
    "dev": {
      "q-77": {"ambiguous_question": "Which one?",
               "annotations": [{"long_answer": "It depends."}]}
    }
  })");
  CorpusLoad load = convert_records(path, "asqa");
  REQUIRE(load.records.size() == 1);
  CHECK(load.records[0].id == "q-77");
  CHECK(load.records[0].question == "Which one?");
  REQUIRE(load.records[0].reference_answers.size() == 1);
  fs::remove(path);
}

TEST_CASE("convert: quotesum layout strips span markup") {
  fs::path path = temp_file("svr_qs.json", R"([
    {"id": "qs1", "question_text": "Who invented it?",
     "answers": ["It was [1 Thomas Edison] in [2 1879]."],
     "passages": ["About Edison", {"title": "Bulbs", "text": "History."}]}
  ])");
  CorpusLoad load = convert_records(path, "quotesum");
  REQUIRE(load.records.size() == 1);
  CHECK(load.records[0].reference_answers[0] == "It was Thomas Edison in 1879.");
  CHECK(load.records[0].passages[1] == "Bulbs\nHistory.");
  fs::remove(path);
}

TEST_CASE("convert: unknown format and native passthrough") {
  fs::path path = temp_file("svr_native.jsonl",
                            R"({"id": "n1", "question": "q"})" "\n");
  CHECK_THROWS_AS(convert_records(path, "mystery"), ConfigError);
  CorpusLoad load = convert_records(path, "native");
  CHECK(load.records.size() == 1);
  fs::remove(path);
}
