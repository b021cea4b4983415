#pragma once

#include <optional>
#include <string>
#include <vector>

#include "streamvr/corpus.hpp"
#include "streamvr/metrics.hpp"
#include "streamvr/pipeline.hpp"

namespace streamvr {

struct RunModes {
  bool none = false;
  bool full = false;
  bool streaming = false;
  bool compare = true;  // both modes from one set of sentence verdicts

  bool any() const { return none || full || streaming || compare; }
};

struct RunnerSettings {
  PromptMode prompt_mode = PromptMode::ClosedBook;
  std::size_t context_k = 0;  // passages (open book) or shots (few-shot)
  RunModes modes;
  PipelineOptions pipeline;
  int jobs = 1;
};

// Everything that happened to one corpus record.
struct AnswerRun {
  std::string id;
  std::string question;
  std::string generated_answer;
  long generator_tokens = 0;  // backend-reported (usage counts when available)
  std::vector<std::string> prompt_warnings;
  std::optional<PipelineResult> none;
  std::optional<PipelineResult> streaming;
  std::optional<PipelineResult> full;
  std::vector<std::string> references;
  std::optional<double> rouge_original;
  std::optional<double> rouge_streaming;
  std::optional<double> rouge_full;
  std::optional<std::string> error;
};

// Generates an answer for each record, replays it through the requested
// modes, and scores it against the references. Answers fail independently;
// a failed answer carries its error and stays in the output. Records run in
// parallel across `jobs` workers; the result order is by record id.
std::vector<AnswerRun> run_corpus(const std::vector<CorpusRecord>& records,
                                  const Backends& backends,
                                  const RunnerSettings& settings);

// Distills a run into the report row the aggregator consumes.
AnswerObservation observe(const AnswerRun& run);

}  // namespace streamvr
