#include "streamvr/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "streamvr/errors.hpp"
#include "streamvr/fs_io.hpp"
#include "streamvr/text.hpp"

namespace streamvr {

namespace {

using nlohmann::json;

std::vector<std::string> string_list(const json& value) {
  std::vector<std::string> out;
  if (value.is_string()) {
    out.push_back(value.get<std::string>());
    return out;
  }
  for (const auto& item : value) {
    if (item.is_string()) out.push_back(item.get<std::string>());
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> example_list(const json& value) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : value) {
    if (item.is_array() && item.size() == 2) {
      out.emplace_back(item[0].get<std::string>(), item[1].get<std::string>());
    } else if (item.is_object()) {
      out.emplace_back(item.at("question").get<std::string>(),
                       item.at("answer").get<std::string>());
    }
  }
  return out;
}

CorpusRecord record_from_json(const json& doc) {
  CorpusRecord record;
  if (!doc.contains("id") || !doc.at("id").is_string()) {
    throw ConfigError("missing field: id");
  }
  record.id = doc.at("id").get<std::string>();
  if (!doc.contains("question") || !doc.at("question").is_string() ||
      doc.at("question").get<std::string>().empty()) {
    throw ConfigError("missing field: question");
  }
  record.question = doc.at("question").get<std::string>();
  if (doc.contains("answers")) record.reference_answers = string_list(doc.at("answers"));
  if (doc.contains("passages")) record.passages = string_list(doc.at("passages"));
  if (doc.contains("examples")) record.examples = example_list(doc.at("examples"));
  return record;
}

json record_to_json(const CorpusRecord& record) {
  json examples = json::array();
  for (const auto& [q, a] : record.examples) {
    examples.push_back({{"question", q}, {"answer", a}});
  }
  return json{{"id", record.id},
              {"question", record.question},
              {"answers", record.reference_answers},
              {"passages", record.passages},
              {"examples", examples}};
}

// Strips QuoteSum-style span markup: "[3 Thomas Edison]" -> "Thomas Edison".
std::string strip_span_markup(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '[') {
      std::size_t j = i + 1;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j > i + 1 && j < text.size() && text[j] == ' ') {
        i = j + 1;  // drop "[<digits> "
        continue;
      }
    }
    if (text[i] == ']') {
      ++i;
      continue;
    }
    out += text[i];
    ++i;
  }
  return out;
}

std::string passage_text(const json& doc) {
  if (doc.is_string()) return doc.get<std::string>();
  std::string title = doc.value("title", "");
  std::string text = doc.value("text", doc.value("passage", ""));
  if (title.empty()) return text;
  return title + "\n" + text;
}

CorpusLoad convert_asqa(const json& doc) {
  CorpusLoad load;
  auto from_item = [](const json& item, const std::string& fallback_id) {
    CorpusRecord record;
    record.id = item.contains("sample_id")
                    ? (item.at("sample_id").is_string()
                           ? item.at("sample_id").get<std::string>()
                           : std::to_string(item.at("sample_id").get<long>()))
                    : fallback_id;
    record.question = item.contains("question")
                          ? item.at("question").get<std::string>()
                          : item.value("ambiguous_question", "");
    if (item.contains("answer") && item.at("answer").is_string()) {
      record.reference_answers.push_back(item.at("answer").get<std::string>());
    }
    if (item.contains("annotations")) {
      for (const auto& annotation : item.at("annotations")) {
        std::string long_answer = annotation.value("long_answer", "");
        if (!long_answer.empty()) record.reference_answers.push_back(long_answer);
      }
    }
    if (item.contains("docs")) {
      for (const auto& d : item.at("docs")) record.passages.push_back(passage_text(d));
    }
    return record;
  };
  if (doc.is_array()) {
    std::size_t index = 0;
    for (const auto& item : doc) {
      load.records.push_back(from_item(item, "asqa-" + std::to_string(index)));
      ++index;
    }
    return load;
  }
  // Original release: {"train": {id: {...}}, "dev": {id: {...}}}
  for (const char* split : {"dev", "train"}) {
    if (!doc.contains(split)) continue;
    for (const auto& [id, item] : doc.at(split).items()) {
      CorpusRecord record = from_item(item, id);
      record.id = id;
      load.records.push_back(std::move(record));
    }
  }
  if (load.records.empty() && doc.is_object()) {
    load.issues.push_back({0, "no dev/train split and not a record array"});
  }
  return load;
}

CorpusLoad convert_quotesum(const json& doc) {
  CorpusLoad load;
  const json& items = doc.is_array() ? doc : doc.at("examples");
  std::size_t index = 0;
  for (const auto& item : items) {
    CorpusRecord record;
    record.id = item.contains("id") ? item.at("id").get<std::string>()
                                    : "quotesum-" + std::to_string(index);
    record.question = item.contains("question")
                          ? item.at("question").get<std::string>()
                          : item.value("question_text", "");
    json answers = json::array();
    if (item.contains("answers")) {
      answers = item.at("answers");
    } else if (item.contains("answer")) {
      answers.push_back(item.at("answer"));
    }
    for (const auto& answer : answers) {
      record.reference_answers.push_back(
          strip_span_markup(answer.get<std::string>()));
    }
    if (item.contains("passages")) {
      for (const auto& p : item.at("passages")) {
        record.passages.push_back(passage_text(p));
      }
    }
    load.records.push_back(std::move(record));
    ++index;
  }
  return load;
}

}  // namespace

CorpusLoad load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.good()) throw IoError("cannot open corpus: " + path.string());
  CorpusLoad load;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    try {
      CorpusRecord record = record_from_json(json::parse(line));
      if (!seen_ids.insert(record.id).second) {
        load.issues.push_back({line_number, "duplicate id: " + record.id});
        continue;
      }
      load.records.push_back(std::move(record));
    } catch (const json::exception& e) {
      load.issues.push_back({line_number, e.what()});
    } catch (const ConfigError& e) {
      load.issues.push_back({line_number, e.what()});
    }
  }
  return load;
}

void write_corpus(const std::filesystem::path& path,
                  const std::vector<CorpusRecord>& records) {
  std::string content;
  for (const CorpusRecord& record : records) {
    content += record_to_json(record).dump();
    content += '\n';
  }
  atomic_write(path, content);
}

std::vector<std::string> rank_contexts(const std::string& question,
                                       const std::vector<std::string>& pool,
                                       std::size_t k) {
  if (k == 0) return {};
  const auto question_tokens = word_tokens(question);
  const std::set<std::string> question_set(question_tokens.begin(),
                                           question_tokens.end());
  struct Scored {
    double score;
    std::size_t index;
  };
  std::vector<Scored> scored;
  scored.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto tokens = word_tokens(pool[i]);
    const std::set<std::string> entry_set(tokens.begin(), tokens.end());
    double score = 0.0;
    if (!question_set.empty() && !entry_set.empty()) {
      std::size_t overlap = 0;
      for (const auto& token : entry_set) overlap += question_set.count(token);
      score = static_cast<double>(overlap) /
              std::sqrt(static_cast<double>(question_set.size()) *
                        static_cast<double>(entry_set.size()));
    }
    scored.push_back({score, i});
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Scored& a, const Scored& b) { return a.score > b.score; });
  std::vector<std::string> out;
  out.reserve(std::min(k, pool.size()));
  for (std::size_t i = 0; i < scored.size() && out.size() < k; ++i) {
    out.push_back(pool[scored[i].index]);
  }
  return out;
}

std::string_view prompt_mode_name(PromptMode mode) {
  switch (mode) {
    case PromptMode::ClosedBook:
      return "closed";
    case PromptMode::OpenBook:
      return "open";
    case PromptMode::FewShot:
      return "fewshot";
  }
  return "unknown";
}

PromptMode prompt_mode_from_name(std::string_view name) {
  if (name == "closed" || name == "closed-book") return PromptMode::ClosedBook;
  if (name == "open" || name == "open-book") return PromptMode::OpenBook;
  if (name == "fewshot" || name == "few-shot") return PromptMode::FewShot;
  throw ConfigError("unknown prompt mode: " + std::string(name));
}

BuiltPrompt build_prompt(const CorpusRecord& record, PromptMode mode, std::size_t k,
                         const PromptLibrary& prompts) {
  BuiltPrompt built;
  switch (mode) {
    case PromptMode::ClosedBook: {
      built.text = prompts.render("generate_closed_book", {{"question", record.question}});
      break;
    }
    case PromptMode::OpenBook: {
      const std::size_t available = std::min(k, record.passages.size());
      if (available < k) {
        built.warnings.push_back("requested " + std::to_string(k) + " passages, only " +
                                 std::to_string(record.passages.size()) + " available");
      }
      std::string block;
      for (std::size_t i = 0; i < available; ++i) {
        block += "Passage " + std::to_string(i + 1) + ": " + record.passages[i] + "\n";
      }
      if (!block.empty()) block += "\n";
      built.context = block;
      built.text = prompts.render(
          "generate_open_book", {{"passages", block}, {"question", record.question}});
      break;
    }
    case PromptMode::FewShot: {
      std::vector<std::string> questions;
      questions.reserve(record.examples.size());
      for (const auto& [q, a] : record.examples) questions.push_back(q);
      const auto ranked = rank_contexts(record.question, questions, k);
      if (ranked.size() < k) {
        built.warnings.push_back("requested " + std::to_string(k) + " shots, only " +
                                 std::to_string(record.examples.size()) + " available");
      }
      std::string block;
      for (const std::string& q : ranked) {
        auto it = std::find_if(record.examples.begin(), record.examples.end(),
                               [&](const auto& e) { return e.first == q; });
        block += "Question: " + it->first + "\nAnswer: " + it->second + "\n\n";
      }
      built.context = block;
      built.text = prompts.render(
          "generate_few_shot", {{"examples", block}, {"question", record.question}});
      break;
    }
  }
  return built;
}

CorpusLoad convert_records(const std::filesystem::path& path, std::string_view format) {
  if (format == "native") return load_corpus(path);
  std::ifstream in(path);
  if (!in.good()) throw IoError("cannot open dataset: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  if (format == "asqa") return convert_asqa(doc);
  if (format == "quotesum") return convert_quotesum(doc);
  throw ConfigError("unknown dataset format: " + std::string(format));
}

}  // namespace streamvr
