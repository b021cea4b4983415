#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "streamvr/pipeline.hpp"

namespace streamvr {

// Refinement-token saving of streaming over full verification: 1 - t_s/t_f,
// where both are mean refinement tokens per answer. Throws DomainError when
// t_f is zero (no refinement occurred) or either input is negative.
double efficiency(double t_s, double t_f);

struct DerailedStats {
  long false_answers = 0;
  long derailed_answers = 0;
  double rate = 0.0;  // derailed / false
};

// An answer counts as false when any sentence verdict is false; it counts
// as derailed when its false sentences run contiguously from the first
// false one to the final sentence. Throws DomainError when no answer is
// false (the rate has no denominator) or an answer has no verdicts.
DerailedStats derailed_rate(const std::vector<std::vector<bool>>& verdicts_per_answer);

// LCS-based F1 over word tokens (lowercased, punctuation stripped). Zero
// when either side has no tokens.
double rouge_l(std::string_view candidate, std::string_view reference);

// Distilled per-answer stats, one row of the corpus report.
struct AnswerObservation {
  std::string id;
  bool errored = false;
  std::string error;
  long t_gen = 0;
  std::optional<TokenLedger> streaming;
  std::optional<TokenLedger> full;
  std::vector<bool> verdicts;  // streaming sentence verdicts, in order
  std::optional<double> rouge_streaming;
  std::optional<double> rouge_full;
  std::optional<double> rouge_original;
  long observed_latency_ms = 0;
};

struct ModeAverages {
  double t_ver = 0.0;
  double t_ref = 0.0;
  std::optional<double> rouge;
};

struct CorpusReport {
  std::size_t answers = 0;
  std::size_t errored = 0;
  double mean_t_gen = 0.0;
  std::optional<ModeAverages> streaming;
  std::optional<ModeAverages> full;
  // 1 - T_S/T_F over mean refinement tokens; absent when the full mode never
  // refined (reported as n/a, not 0 or 1).
  std::optional<double> efficiency;
  std::optional<DerailedStats> derailed;  // absent when no answer was false
  std::optional<double> mean_rouge_original;
  std::vector<AnswerObservation> rows;
};

// Means over non-errored answers; efficiency and derailed stats appear only
// where defined.
CorpusReport aggregate(const std::vector<AnswerObservation>& observations);

}  // namespace streamvr
