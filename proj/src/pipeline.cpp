#include "streamvr/pipeline.hpp"

#include "streamvr/errors.hpp"
#include "streamvr/text.hpp"

namespace streamvr {

namespace {

std::string context_block(const std::optional<std::string>& context) {
  if (!context || context->empty()) return "";
  return "Context: " + *context + "\n";
}

std::string verifier_preamble(const std::string& question,
                              const PipelineOptions& options) {
  std::string question_block =
      options.include_question_in_verifier_context ? "Question: " + question : "";
  return options.library().render("verify_context",
                                  {{"question_block", std::move(question_block)}});
}

void require_backend(const std::shared_ptr<Backend>& backend, const char* role,
                     int step) {
  if (!backend) {
    throw PipelineError(std::string("no backend configured for role ") + role, step);
  }
}

ModelResponse guarded_call(Backend& backend, const ModelRequest& request, int step) {
  if (request.prompt.empty()) throw PipelineError("empty prompt", step);
  if (request.max_tokens <= 0) throw PipelineError("max_tokens must be positive", step);
  try {
    return call(backend, request);
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(e.what(), step);
  }
}

}  // namespace

std::string_view pipeline_mode_name(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::None:
      return "none";
    case PipelineMode::FullVR:
      return "full";
    case PipelineMode::StreamingVR:
      return "streaming";
  }
  return "unknown";
}

std::string IntermediateAnswer::joined() const {
  std::string out;
  for (const Sentence& s : finalized) {
    if (!out.empty()) out += ' ';
    out += s.trimmed();
  }
  return out;
}

PipelineResult run_streaming_vr(const std::string& question,
                                const std::optional<std::string>& context,
                                SentenceSource& stream, const Backends& backends,
                                const PipelineOptions& options) {
  PipelineResult result;
  result.question = question;
  result.mode = PipelineMode::StreamingVR;

  IntermediateAnswer prefix;
  std::deque<Sentence> regenerated;  // feedback mode: replaces the stream
  bool feedback_active = false;

  auto pull = [&]() -> std::optional<Sentence> {
    if (feedback_active) {
      if (regenerated.empty()) return std::nullopt;
      Sentence s = std::move(regenerated.front());
      regenerated.pop_front();
      return s;
    }
    return stream.next();
  };

  const std::string preamble = verifier_preamble(question, options);
  int step = 0;
  while (auto candidate = pull()) {
    ++step;
    require_backend(backends.verifier, "verify", step);

    StepRecord record;
    record.step = step;
    record.original = *candidate;
    record.tokens_verified = count_tokens(candidate->trimmed());

    ModelRequest verify_request;
    verify_request.role = Role::Verify;
    verify_request.prompt = format_verifier_input(prefix.finalized, *candidate);
    verify_request.context = preamble;
    verify_request.max_tokens = options.verifier_max_tokens;
    ModelResponse verify_response =
        guarded_call(*backends.verifier, verify_request, step);
    result.observed_latency_ms += verify_response.latency_ms;
    record.verdict = Verdict{*verify_response.verdict, backends.verifier->name(), step};

    if (record.verdict.value) {
      prefix.finalized.push_back(*candidate);
    } else {
      require_backend(backends.refiner, "refine", step);
      ModelRequest refine_request;
      refine_request.role = Role::Refine;
      refine_request.prompt = options.library().render(
          "refine_sentence", {{"question", question},
                              {"context_block", context_block(context)},
                              {"prefix", prefix.joined()},
                              {"sentence", std::string(candidate->trimmed())}});
      refine_request.max_tokens = options.refiner_max_tokens;
      ModelResponse refine_response =
          guarded_call(*backends.refiner, refine_request, step);
      result.observed_latency_ms += refine_response.latency_ms;
      std::string refined_text{trim(refine_response.text)};
      if (refined_text.empty()) {
        throw PipelineError("refiner returned empty output", step);
      }
      record.tokens_refined = refine_response.tokens_generated;
      record.refined = Sentence::detached(refined_text);

      // The rewrite may span several sentences; all of them substitute the
      // candidate and all of their tokens count as refinement cost.
      for (Sentence& piece : segment(refined_text).sentences) {
        prefix.finalized.push_back(std::move(piece));
      }

      if (options.reverify_refined) {
        // Informational second opinion; the sentence is not refined again.
        ModelRequest again;
        again.role = Role::Verify;
        std::span<const Sentence> before{prefix.finalized.data(),
                                         prefix.finalized.size() - 1};
        again.prompt = format_verifier_input(before, prefix.finalized.back());
        again.context = preamble;
        again.max_tokens = options.verifier_max_tokens;
        ModelResponse second = guarded_call(*backends.verifier, again, step);
        result.observed_latency_ms += second.latency_ms;
        record.tokens_verified += count_tokens(prefix.finalized.back().trimmed());
      }

      if (options.feedback_regeneration && backends.generator) {
        ModelRequest continue_request;
        continue_request.role = Role::Generate;
        continue_request.prompt = options.library().render(
            "continue_answer", {{"question", question},
                                {"context_block", context_block(context)},
                                {"prefix", prefix.joined()}});
        continue_request.context = context;
        ModelResponse continuation =
            guarded_call(*backends.generator, continue_request, step);
        result.observed_latency_ms += continuation.latency_ms;
        result.ledger.t_gen += continuation.tokens_generated;
        regenerated.clear();
        for (Sentence& s : segment(trim(continuation.text)).sentences) {
          regenerated.push_back(std::move(s));
        }
        feedback_active = true;
      }
    }

    prefix.step = step;
    result.ledger.t_gen += count_tokens(record.original.text);
    result.ledger.t_ver += record.tokens_verified;
    result.ledger.t_ref += record.tokens_refined;
    result.steps.push_back(std::move(record));
  }

  result.final_answer = prefix.joined();
  return result;
}

PipelineResult run_full_vr(const std::string& question,
                           const std::optional<std::string>& context,
                           const SegmentedAnswer& answer, const Backends& backends,
                           FullVerdictSource verdict_source,
                           const PipelineOptions& options,
                           const std::vector<Verdict>* shared_verdicts) {
  PipelineResult result;
  result.question = question;
  result.mode = PipelineMode::FullVR;
  result.ledger.t_gen = count_tokens(answer.source);

  if (answer.empty()) {
    // Nothing to verify; the empty answer stands.
    result.final_answer = answer.source;
    result.answer_verdict = Verdict{true, "", 0};
    return result;
  }

  const std::string joined = answer.joined();
  bool value = true;
  std::string provider;

  if (verdict_source == FullVerdictSource::Independent) {
    require_backend(backends.verifier, "verify", 0);
    ModelRequest request;
    request.role = Role::Verify;
    request.prompt = joined;
    request.context = verifier_preamble(question, options);
    request.max_tokens = options.verifier_max_tokens;
    ModelResponse response = guarded_call(*backends.verifier, request, 0);
    result.observed_latency_ms += response.latency_ms;
    value = *response.verdict;
    provider = backends.verifier->name();
    result.ledger.t_ver = count_tokens(answer.source);
  } else if (shared_verdicts != nullptr) {
    // Shared sentence verdicts: the answer is false if any sentence is.
    for (const Verdict& v : *shared_verdicts) value = value && v.value;
    provider = shared_verdicts->empty() ? "" : shared_verdicts->front().provider;
    result.ledger.t_ver = count_tokens(answer.source);
  } else {
    require_backend(backends.verifier, "verify", 0);
    const std::string preamble = verifier_preamble(question, options);
    std::vector<Sentence> prefix;
    int step = 0;
    for (const Sentence& s : answer.sentences) {
      ++step;
      ModelRequest request;
      request.role = Role::Verify;
      request.prompt = format_verifier_input(prefix, s);
      request.context = preamble;
      request.max_tokens = options.verifier_max_tokens;
      ModelResponse response = guarded_call(*backends.verifier, request, step);
      result.observed_latency_ms += response.latency_ms;
      value = value && *response.verdict;
      result.ledger.t_ver += count_tokens(s.trimmed());
      prefix.push_back(s);
    }
    provider = backends.verifier->name();
  }

  result.answer_verdict = Verdict{value, provider, 0};
  if (value) {
    result.final_answer = answer.source;
    return result;
  }

  require_backend(backends.refiner, "refine", 0);
  ModelRequest refine_request;
  refine_request.role = Role::Refine;
  refine_request.prompt = options.library().render(
      "refine_answer", {{"question", question},
                        {"context_block", context_block(context)},
                        {"answer", joined}});
  refine_request.max_tokens = options.refiner_max_tokens;
  ModelResponse refined = guarded_call(*backends.refiner, refine_request, 0);
  result.observed_latency_ms += refined.latency_ms;
  std::string text{trim(refined.text)};
  if (text.empty()) throw PipelineError("refiner returned empty output", 0);
  result.final_answer = std::move(text);
  result.ledger.t_ref = refined.tokens_generated;
  return result;
}

PipelineResult run_passthrough(const std::string& question,
                               const SegmentedAnswer& answer) {
  PipelineResult result;
  result.question = question;
  result.mode = PipelineMode::None;
  result.final_answer = answer.source;
  result.ledger.t_gen = count_tokens(answer.source);
  return result;
}

ComparePair compare(const std::string& question,
                    const std::optional<std::string>& context,
                    const SegmentedAnswer& answer, const Backends& backends,
                    const PipelineOptions& options) {
  VectorSentenceSource stream(answer);
  PipelineResult streaming =
      run_streaming_vr(question, context, stream, backends, options);

  std::vector<Verdict> verdicts;
  verdicts.reserve(streaming.steps.size());
  for (const StepRecord& record : streaming.steps) verdicts.push_back(record.verdict);

  PipelineResult full =
      run_full_vr(question, context, answer, backends,
                  FullVerdictSource::FromSentenceVerdicts, options, &verdicts);

  // Both modes verify exactly the tokens of the original answer.
  const long source_tokens = count_tokens(answer.source);
  if (!options.reverify_refined &&
      (streaming.ledger.t_ver != source_tokens || full.ledger.t_ver != source_tokens)) {
    throw Error("verification-cost identity violated: streaming=" +
                std::to_string(streaming.ledger.t_ver) +
                " full=" + std::to_string(full.ledger.t_ver) +
                " answer=" + std::to_string(source_tokens));
  }
  return {std::move(streaming), std::move(full)};
}

}  // namespace streamvr
