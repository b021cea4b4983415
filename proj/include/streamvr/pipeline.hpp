#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "streamvr/prompts.hpp"
#include "streamvr/providers.hpp"
#include "streamvr/segmenter.hpp"

namespace streamvr {

enum class PipelineMode { None, FullVR, StreamingVR };
std::string_view pipeline_mode_name(PipelineMode mode);

// Binary verifier outcome with provenance: which backend produced it and at
// which step (0 = whole-answer verdict).
struct Verdict {
  bool value = false;
  std::string provider;
  int step = 0;
};

// The finalized prefix while an answer streams through: the sentences kept
// or substituted so far. step counts processed candidates; it equals
// finalized.size() except after a refinement that re-segmented into several
// sentences. Step 0 is the empty prefix.
struct IntermediateAnswer {
  std::vector<Sentence> finalized;
  int step = 0;

  std::string joined() const;
};

struct StepRecord {
  int step = 0;  // 1-based
  Sentence original;
  Verdict verdict;
  std::optional<Sentence> refined;  // present iff verdict.value is false
  long tokens_verified = 0;
  long tokens_refined = 0;  // zero iff the verdict was true
};

// Per-answer token totals: generated, verified, refined.
struct TokenLedger {
  long t_gen = 0;
  long t_ver = 0;
  long t_ref = 0;
};

struct PipelineResult {
  std::string question;
  PipelineMode mode = PipelineMode::None;
  std::string final_answer;
  std::vector<StepRecord> steps;
  TokenLedger ledger;
  std::optional<Verdict> answer_verdict;  // whole-answer verdict (FullVR)
  long observed_latency_ms = 0;           // summed backend-reported latency
};

struct Backends {
  std::shared_ptr<Backend> generator;
  std::shared_ptr<Backend> verifier;
  std::shared_ptr<Backend> refiner;
};

struct PipelineOptions {
  // The verifier preamble names the question (configurable: the formatted
  // "[SEP]" input itself never changes either way).
  bool include_question_in_verifier_context = true;
  // Re-verify a refined sentence and record the outcome; the sentence is
  // never refined a second time. Adds verifier tokens to t_ver, which breaks
  // the verification-cost identity — off by default.
  bool reverify_refined = false;
  // After a refinement, ask the generator to re-generate the continuation
  // from the refined prefix instead of replaying the original stream.
  // Excluded from all accounting comparisons; off by default.
  bool feedback_regeneration = false;
  int verifier_max_tokens = 8;
  int refiner_max_tokens = 512;
  const PromptLibrary* prompts = nullptr;  // null: the builtin library

  const PromptLibrary& library() const {
    return prompts ? *prompts : PromptLibrary::builtin();
  }
};

// Ordered source of generated sentences.
class SentenceSource {
 public:
  virtual ~SentenceSource() = default;
  virtual std::optional<Sentence> next() = 0;
};

class VectorSentenceSource : public SentenceSource {
 public:
  explicit VectorSentenceSource(std::vector<Sentence> sentences)
      : sentences_(std::move(sentences)) {}
  explicit VectorSentenceSource(const SegmentedAnswer& answer)
      : sentences_(answer.sentences) {}

  std::optional<Sentence> next() override {
    if (index_ >= sentences_.size()) return std::nullopt;
    return sentences_[index_++];
  }

 private:
  std::vector<Sentence> sentences_;
  std::size_t index_ = 0;
};

// Sentence-by-sentence verification and refinement. Each incoming sentence
// is verified against the finalized prefix; a false sentence is replaced by
// the refiner's rewrite (re-segmented if it spans several sentences) before
// the next candidate is verified, so later verifier inputs embed refined
// prefixes. The chain within one answer is strictly sequential; distinct
// answers may run fully in parallel.
//
// Provider failures abort the answer: they surface as PipelineError carrying
// the failing step.
PipelineResult run_streaming_vr(const std::string& question,
                                const std::optional<std::string>& context,
                                SentenceSource& stream, const Backends& backends,
                                const PipelineOptions& options = {});

enum class FullVerdictSource {
  // One whole-answer verifier call decides.
  Independent,
  // The answer is false iff any sentence verdict is false. Without supplied
  // verdicts the verifier is called once per sentence over original
  // prefixes.
  FromSentenceVerdicts,
};

// Whole-answer verification with full regeneration on a false verdict.
// shared_verdicts, when given with FromSentenceVerdicts, supplies the
// per-sentence verdicts (e.g. from a streaming run) so the verifier is not
// called again.
PipelineResult run_full_vr(const std::string& question,
                           const std::optional<std::string>& context,
                           const SegmentedAnswer& answer, const Backends& backends,
                           FullVerdictSource verdict_source,
                           const PipelineOptions& options = {},
                           const std::vector<Verdict>* shared_verdicts = nullptr);

// Accounting-only passthrough (mode "none").
PipelineResult run_passthrough(const std::string& question,
                               const SegmentedAnswer& answer);

struct ComparePair {
  PipelineResult streaming;
  PipelineResult full;
};

// Runs both modes over one fixed answer from a single set of sentence
// verdicts: the verifier runs once per sentence (in the streaming pass) and
// the whole-answer verdict is derived from those verdicts. Both results
// carry the same verified-token total, which equals the token count of the
// original answer; that identity is asserted here for every answer.
ComparePair compare(const std::string& question,
                    const std::optional<std::string>& context,
                    const SegmentedAnswer& answer, const Backends& backends,
                    const PipelineOptions& options = {});

}  // namespace streamvr
