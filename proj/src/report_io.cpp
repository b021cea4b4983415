#include "streamvr/report_io.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "streamvr/errors.hpp"

namespace streamvr {

namespace {

using nlohmann::json;

json ledger_json(const TokenLedger& ledger) {
  return json{{"t_gen", ledger.t_gen}, {"t_ver", ledger.t_ver}, {"t_ref", ledger.t_ref}};
}

json verdict_json(const Verdict& verdict) {
  return json{{"value", verdict.value},
              {"provider", verdict.provider},
              {"step", verdict.step}};
}

json result_json(const PipelineResult& result) {
  json steps = json::array();
  for (const StepRecord& step : result.steps) {
    json entry{{"step", step.step},
               {"original", step.original.text},
               {"verdict", verdict_json(step.verdict)},
               {"tokens_verified", step.tokens_verified},
               {"tokens_refined", step.tokens_refined}};
    if (step.refined) entry["refined"] = step.refined->text;
    steps.push_back(std::move(entry));
  }
  json out{{"mode", std::string(pipeline_mode_name(result.mode))},
           {"final_answer", result.final_answer},
           {"ledger", ledger_json(result.ledger)},
           {"observed_latency_ms", result.observed_latency_ms},
           {"steps", std::move(steps)}};
  if (result.answer_verdict) out["answer_verdict"] = verdict_json(*result.answer_verdict);
  return out;
}

json optional_number(const std::optional<double>& value) {
  if (!value) return nullptr;
  return *value;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

bool is_derailed(const std::vector<bool>& verdicts) {
  auto first_false = std::find(verdicts.begin(), verdicts.end(), false);
  if (first_false == verdicts.end()) return false;
  return std::none_of(first_false, verdicts.end(), [](bool v) { return v; });
}

}  // namespace

std::string report_to_json(const CorpusReport& report) {
  json doc{{"answers", report.answers},
           {"errored", report.errored},
           {"mean_t_gen", report.mean_t_gen},
           {"efficiency", optional_number(report.efficiency)},
           {"mean_rouge_original", optional_number(report.mean_rouge_original)}};
  auto mode_json = [](const std::optional<ModeAverages>& mode) -> json {
    if (!mode) return nullptr;
    return json{{"mean_t_ver", mode->t_ver},
                {"mean_t_ref", mode->t_ref},
                {"mean_rouge", optional_number(mode->rouge)}};
  };
  doc["streaming"] = mode_json(report.streaming);
  doc["full"] = mode_json(report.full);
  if (report.derailed) {
    doc["derailed"] = json{{"false_answers", report.derailed->false_answers},
                           {"derailed_answers", report.derailed->derailed_answers},
                           {"rate", report.derailed->rate}};
  } else {
    doc["derailed"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const CorpusReport& report) {
  std::ostringstream out;
  out << "id,error,t_gen,streaming_t_ver,streaming_t_ref,full_t_ver,full_t_ref,"
         "sentences,false_sentences,derailed,rouge_original,rouge_streaming,"
         "rouge_full,latency_ms\n";
  auto number = [](const std::optional<double>& v) {
    if (!v) return std::string();
    std::ostringstream s;
    s << *v;
    return s.str();
  };
  for (const AnswerObservation& row : report.rows) {
    long false_count = static_cast<long>(
        std::count(row.verdicts.begin(), row.verdicts.end(), false));
    out << csv_escape(row.id) << ',' << csv_escape(row.error) << ',';
    if (!row.errored) out << row.t_gen;
    out << ',';
    if (row.streaming) out << row.streaming->t_ver;
    out << ',';
    if (row.streaming) out << row.streaming->t_ref;
    out << ',';
    if (row.full) out << row.full->t_ver;
    out << ',';
    if (row.full) out << row.full->t_ref;
    out << ',';
    if (!row.errored) out << row.verdicts.size();
    out << ',';
    if (!row.errored) out << false_count;
    out << ',';
    if (!row.errored) out << (is_derailed(row.verdicts) ? 1 : 0);
    out << ',' << number(row.rouge_original) << ',' << number(row.rouge_streaming)
        << ',' << number(row.rouge_full) << ',' << row.observed_latency_ms << '\n';
  }
  return out.str();
}

std::string answer_run_to_json(const AnswerRun& run) {
  json doc{{"id", run.id}, {"question", run.question}};
  if (run.error) {
    doc["error"] = *run.error;
    return doc.dump();
  }
  doc["generated_answer"] = run.generated_answer;
  doc["generator_tokens"] = run.generator_tokens;
  if (!run.prompt_warnings.empty()) doc["prompt_warnings"] = run.prompt_warnings;
  if (run.none) doc["none"] = result_json(*run.none);
  if (run.streaming) doc["streaming"] = result_json(*run.streaming);
  if (run.full) doc["full"] = result_json(*run.full);
  json rouge{{"original", optional_number(run.rouge_original)},
             {"streaming", optional_number(run.rouge_streaming)},
             {"full", optional_number(run.rouge_full)}};
  doc["rouge"] = std::move(rouge);
  return doc.dump();
}

}  // namespace streamvr
