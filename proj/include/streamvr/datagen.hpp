#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "streamvr/corpus.hpp"
#include "streamvr/providers.hpp"

namespace streamvr {

enum class ExampleLabel { True, False };
enum class Provenance { ReferenceTrue, Paraphrase, Falsified };

std::string_view label_name(ExampleLabel label);
std::string_view provenance_name(Provenance provenance);

// One training example for the streaming verifier: the incremental answer
// prefix with "[SEP]" immediately before the sentence under judgment. In
// False examples only that final sentence is falsified; the prefix stays
// byte-identical to the True counterpart.
struct VerifierExample {
  std::string question;
  std::string formatted_input;
  ExampleLabel label = ExampleLabel::True;
  int stage = 1;  // t >= 1
  Provenance provenance = Provenance::ReferenceTrue;
  std::optional<double> temperature_used;  // falsification temperature

  bool operator==(const VerifierExample&) const = default;
};

// True-labeled stage set of a reference answer: one example per prefix
// length t = 1..n. Throws EmptyAnswer when the reference segments to zero
// sentences.
std::vector<VerifierExample> build_stages(const std::string& question,
                                          const std::string& reference_answer);

// Turns a correct sentence into a plausible lie via the generation backend.
// prefix is the (possibly empty) answer paragraph before the sentence.
// Throws EmptyModelOutput when the model returns only whitespace.
std::string falsify(const std::string& question, const std::string& prefix,
                    const std::string& sentence, Backend& backend, double temperature,
                    const PromptLibrary& prompts = PromptLibrary::builtin());

struct DatagenConfig {
  std::vector<double> temperatures{0.3, 0.5, 0.7};  // falsification fan-out
  int paraphrases_per_stage = 1;                    // True-label augmentation
  int max_tokens = 256;
  const PromptLibrary* prompts = nullptr;

  const PromptLibrary& library() const {
    return prompts ? *prompts : PromptLibrary::builtin();
  }
};

struct SourceRecord {
  std::string question;
  std::string answer;
};

struct RecordFailure {
  std::size_t record_index = 0;
  std::string message;
};

struct DatagenOutcome {
  std::vector<VerifierExample> examples;
  std::vector<RecordFailure> failures;
};

// Builds the verifier corpus over all records: the True stage set, paraphrase
// True augmentation, and per-temperature falsifications of each stage's
// final sentence. Records fail independently; the corpus is still emitted.
// Output order is (record, stage, provenance, temperature).
DatagenOutcome build_corpus(const std::vector<SourceRecord>& records, Backend& backend,
                            const DatagenConfig& config = {});

// Line-delimited JSON: {question, input, label, stage, provenance, temperature}.
void write_examples(const std::filesystem::path& path,
                    const std::vector<VerifierExample>& examples);
std::vector<VerifierExample> read_examples(const std::filesystem::path& path);

struct SourceLoad {
  std::vector<SourceRecord> records;
  std::vector<LineIssue> issues;
};

// Reads {question, answer} line-delimited JSON.
SourceLoad load_source_records(const std::filesystem::path& path);

}  // namespace streamvr
