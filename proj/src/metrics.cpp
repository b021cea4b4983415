#include "streamvr/metrics.hpp"

#include <algorithm>

#include "streamvr/errors.hpp"
#include "streamvr/text.hpp"

namespace streamvr {

double efficiency(double t_s, double t_f) {
  if (t_s < 0 || t_f < 0) throw DomainError("refinement token means must be >= 0");
  if (t_f == 0) throw DomainError("no refinement occurred: efficiency undefined");
  return 1.0 - t_s / t_f;
}

DerailedStats derailed_rate(const std::vector<std::vector<bool>>& verdicts_per_answer) {
  DerailedStats stats;
  for (const auto& verdicts : verdicts_per_answer) {
    if (verdicts.empty()) throw DomainError("answer without verdicts");
    auto first_false = std::find(verdicts.begin(), verdicts.end(), false);
    if (first_false == verdicts.end()) continue;
    ++stats.false_answers;
    bool derailed = std::none_of(first_false, verdicts.end(), [](bool v) { return v; });
    if (derailed) ++stats.derailed_answers;
  }
  if (stats.false_answers == 0) {
    throw DomainError("no false answers: derailed rate undefined");
  }
  stats.rate = static_cast<double>(stats.derailed_answers) /
               static_cast<double>(stats.false_answers);
  return stats;
}

double rouge_l(std::string_view candidate, std::string_view reference) {
  const std::vector<std::string> c = word_tokens(candidate);
  const std::vector<std::string> r = word_tokens(reference);
  if (c.empty() || r.empty()) return 0.0;
  // LCS, one DP row at a time.
  std::vector<std::size_t> prev(r.size() + 1, 0);
  std::vector<std::size_t> cur(r.size() + 1, 0);
  for (std::size_t i = 1; i <= c.size(); ++i) {
    for (std::size_t j = 1; j <= r.size(); ++j) {
      cur[j] = (c[i - 1] == r[j - 1]) ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[r.size()]);
  if (lcs == 0.0) return 0.0;
  const double precision = lcs / static_cast<double>(c.size());
  const double recall = lcs / static_cast<double>(r.size());
  return 2.0 * precision * recall / (precision + recall);
}

namespace {

struct ModeAccumulator {
  long count = 0;
  double t_ver_sum = 0.0;
  double t_ref_sum = 0.0;
  double rouge_sum = 0.0;
  long rouge_count = 0;

  void add(const TokenLedger& ledger, const std::optional<double>& rouge) {
    ++count;
    t_ver_sum += static_cast<double>(ledger.t_ver);
    t_ref_sum += static_cast<double>(ledger.t_ref);
    if (rouge) {
      rouge_sum += *rouge;
      ++rouge_count;
    }
  }

  std::optional<ModeAverages> finish() const {
    if (count == 0) return std::nullopt;
    ModeAverages avg;
    avg.t_ver = t_ver_sum / static_cast<double>(count);
    avg.t_ref = t_ref_sum / static_cast<double>(count);
    if (rouge_count > 0) avg.rouge = rouge_sum / static_cast<double>(rouge_count);
    return avg;
  }
};

}  // namespace

CorpusReport aggregate(const std::vector<AnswerObservation>& observations) {
  CorpusReport report;
  report.rows = observations;
  report.answers = observations.size();

  ModeAccumulator streaming;
  ModeAccumulator full;
  double t_gen_sum = 0.0;
  long scored = 0;
  double rouge_orig_sum = 0.0;
  long rouge_orig_count = 0;
  std::vector<std::vector<bool>> verdict_lists;

  for (const AnswerObservation& row : observations) {
    if (row.errored) {
      ++report.errored;
      continue;
    }
    ++scored;
    t_gen_sum += static_cast<double>(row.t_gen);
    if (row.streaming) streaming.add(*row.streaming, row.rouge_streaming);
    if (row.full) full.add(*row.full, row.rouge_full);
    if (row.rouge_original) {
      rouge_orig_sum += *row.rouge_original;
      ++rouge_orig_count;
    }
    if (!row.verdicts.empty()) verdict_lists.push_back(row.verdicts);
  }

  if (scored > 0) report.mean_t_gen = t_gen_sum / static_cast<double>(scored);
  report.streaming = streaming.finish();
  report.full = full.finish();
  if (rouge_orig_count > 0) {
    report.mean_rouge_original = rouge_orig_sum / static_cast<double>(rouge_orig_count);
  }

  if (report.streaming && report.full && report.full->t_ref > 0) {
    report.efficiency = efficiency(report.streaming->t_ref, report.full->t_ref);
  }

  bool any_false = false;
  for (const auto& verdicts : verdict_lists) {
    if (std::find(verdicts.begin(), verdicts.end(), false) != verdicts.end()) {
      any_false = true;
      break;
    }
  }
  if (any_false) report.derailed = derailed_rate(verdict_lists);

  return report;
}

}  // namespace streamvr
