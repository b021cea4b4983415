#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "streamvr/fs_io.hpp"
#include "streamvr/metrics.hpp"
#include "streamvr/runner.hpp"

namespace streamvr {

// Corpus-level summary, deterministic layout (sorted keys, no timestamps).
std::string report_to_json(const CorpusReport& report);

// One row per answer, header included.
std::string report_to_csv(const CorpusReport& report);

// One line of the per-answer JSONL artifact (no trailing newline).
std::string answer_run_to_json(const AnswerRun& run);

}  // namespace streamvr
