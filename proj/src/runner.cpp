#include "streamvr/runner.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "streamvr/errors.hpp"
#include "streamvr/text.hpp"

namespace streamvr {

namespace {

std::optional<double> best_rouge(const std::string& candidate,
                                 const std::vector<std::string>& references) {
  if (references.empty() || candidate.empty()) return std::nullopt;
  double best = 0.0;
  for (const std::string& reference : references) {
    best = std::max(best, rouge_l(candidate, reference));
  }
  return best;
}

AnswerRun run_one(const CorpusRecord& record, const Backends& backends,
                  const RunnerSettings& settings) {
  AnswerRun run;
  run.id = record.id;
  run.question = record.question;
  run.references = record.reference_answers;
  try {
    BuiltPrompt prompt = build_prompt(record, settings.prompt_mode, settings.context_k,
                                      settings.pipeline.library());
    run.prompt_warnings = prompt.warnings;

    if (!backends.generator) {
      throw ConfigError("no backend configured for role generate");
    }
    ModelRequest request;
    request.role = Role::Generate;
    request.prompt = prompt.text;
    ModelResponse response = call(*backends.generator, request);
    run.generated_answer = trim(response.text);
    run.generator_tokens = response.tokens_generated;

    SegmentedAnswer answer = segment(run.generated_answer);
    std::optional<std::string> context =
        prompt.context.empty() ? std::nullopt
                               : std::optional<std::string>(prompt.context);

    if (settings.modes.none) {
      run.none = run_passthrough(record.question, answer);
    }
    if (settings.modes.compare) {
      ComparePair pair =
          compare(record.question, context, answer, backends, settings.pipeline);
      run.streaming = std::move(pair.streaming);
      run.full = std::move(pair.full);
    } else {
      if (settings.modes.streaming) {
        VectorSentenceSource stream(answer);
        run.streaming = run_streaming_vr(record.question, context, stream, backends,
                                         settings.pipeline);
      }
      if (settings.modes.full) {
        run.full = run_full_vr(record.question, context, answer, backends,
                               FullVerdictSource::Independent, settings.pipeline);
      }
    }

    run.rouge_original = best_rouge(run.generated_answer, run.references);
    if (run.streaming) {
      run.rouge_streaming = best_rouge(run.streaming->final_answer, run.references);
    }
    if (run.full) {
      run.rouge_full = best_rouge(run.full->final_answer, run.references);
    }
  } catch (const Error& e) {
    run.error = e.what();
  }
  return run;
}

}  // namespace

std::vector<AnswerRun> run_corpus(const std::vector<CorpusRecord>& records,
                                  const Backends& backends,
                                  const RunnerSettings& settings) {
  std::vector<AnswerRun> runs(records.size());
  const int jobs = std::max(1, settings.jobs);
  if (jobs == 1 || records.size() <= 1) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      runs[i] = run_one(records[i], backends, settings);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= records.size()) return;
        runs[i] = run_one(records[i], backends, settings);
      }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(jobs, static_cast<int>(records.size()));
    pool.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  std::stable_sort(runs.begin(), runs.end(),
                   [](const AnswerRun& a, const AnswerRun& b) { return a.id < b.id; });
  return runs;
}

AnswerObservation observe(const AnswerRun& run) {
  AnswerObservation row;
  row.id = run.id;
  if (run.error) {
    row.errored = true;
    row.error = *run.error;
    return row;
  }
  row.t_gen = run.generator_tokens;
  if (run.streaming) {
    row.streaming = run.streaming->ledger;
    for (const StepRecord& step : run.streaming->steps) {
      row.verdicts.push_back(step.verdict.value);
    }
    row.observed_latency_ms += run.streaming->observed_latency_ms;
  }
  if (run.full) {
    row.full = run.full->ledger;
    row.observed_latency_ms += run.full->observed_latency_ms;
  }
  row.rouge_streaming = run.rouge_streaming;
  row.rouge_full = run.rouge_full;
  row.rouge_original = run.rouge_original;
  return row;
}

}  // namespace streamvr
