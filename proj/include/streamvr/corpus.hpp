#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "streamvr/prompts.hpp"

namespace streamvr {

// One question with its pre-retrieved context pools. Passages arrive ranked
// by the upstream retriever; examples are (question, answer) pairs for
// few-shot prompting.
struct CorpusRecord {
  std::string id;
  std::string question;
  std::vector<std::string> reference_answers;
  std::vector<std::string> passages;
  std::vector<std::pair<std::string, std::string>> examples;

  bool operator==(const CorpusRecord&) const = default;
};

struct LineIssue {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct CorpusLoad {
  std::vector<CorpusRecord> records;
  std::vector<LineIssue> issues;
};

// Reads line-delimited JSON records {id, question, answers[], passages[],
// examples[]}. Malformed lines, missing fields, and duplicate ids are
// collected as issues with their line numbers; valid records load anyway.
// Throws IoError when the file cannot be read.
CorpusLoad load_corpus(const std::filesystem::path& path);

// Writes records in the same line-delimited format load_corpus reads.
void write_corpus(const std::filesystem::path& path,
                  const std::vector<CorpusRecord>& records);

// Top-k pool entries by normalized token-set cosine against the question,
// ties broken by pool order. k beyond the pool returns the whole pool,
// ranked. Deterministic.
std::vector<std::string> rank_contexts(const std::string& question,
                                       const std::vector<std::string>& pool,
                                       std::size_t k);

enum class PromptMode { ClosedBook, OpenBook, FewShot };

std::string_view prompt_mode_name(PromptMode mode);
PromptMode prompt_mode_from_name(std::string_view name);  // throws ConfigError

struct BuiltPrompt {
  std::string text;
  // The passages/examples block alone, exactly as it appears in the prompt.
  // This is the generation-time context handed to the refiner later.
  std::string context;
  std::vector<std::string> warnings;
};

// Deterministic generation prompt: instructions, then k passages (provided
// rank order) or k examples (lexical rank order), then the question. Asking
// for more contexts than exist truncates and records a warning.
BuiltPrompt build_prompt(const CorpusRecord& record, PromptMode mode, std::size_t k,
                         const PromptLibrary& prompts = PromptLibrary::builtin());

// Converts a public dataset file (formats: "asqa", "quotesum", "native")
// into records of this schema. See the README for the field mapping.
CorpusLoad convert_records(const std::filesystem::path& path, std::string_view format);

}  // namespace streamvr
