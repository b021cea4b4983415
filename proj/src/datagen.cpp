#include "streamvr/datagen.hpp"

#include <fstream>

#include "json.hpp"
#include "streamvr/errors.hpp"
#include "streamvr/fs_io.hpp"
#include "streamvr/segmenter.hpp"
#include "streamvr/text.hpp"

namespace streamvr {

namespace {

using nlohmann::json;

std::string joined_prefix(const std::vector<Sentence>& sentences, std::size_t count) {
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (!out.empty()) out += ' ';
    out += sentences[i].trimmed();
  }
  return out;
}

ExampleLabel label_from_name(std::string_view name) {
  if (name == "True") return ExampleLabel::True;
  if (name == "False") return ExampleLabel::False;
  throw ConfigError("unknown label: " + std::string(name));
}

Provenance provenance_from_name(std::string_view name) {
  if (name == "reference_true") return Provenance::ReferenceTrue;
  if (name == "paraphrase") return Provenance::Paraphrase;
  if (name == "falsified") return Provenance::Falsified;
  throw ConfigError("unknown provenance: " + std::string(name));
}

}  // namespace

std::string_view label_name(ExampleLabel label) {
  return label == ExampleLabel::True ? "True" : "False";
}

std::string_view provenance_name(Provenance provenance) {
  switch (provenance) {
    case Provenance::ReferenceTrue:
      return "reference_true";
    case Provenance::Paraphrase:
      return "paraphrase";
    case Provenance::Falsified:
      return "falsified";
  }
  return "unknown";
}

std::vector<VerifierExample> build_stages(const std::string& question,
                                          const std::string& reference_answer) {
  SegmentedAnswer segmented = segment(reference_answer);
  if (segmented.empty()) {
    throw EmptyAnswer("reference answer has no sentences: \"" +
                      reference_answer.substr(0, 48) + "\"");
  }
  std::vector<VerifierExample> examples;
  examples.reserve(segmented.size());
  for (std::size_t t = 1; t <= segmented.size(); ++t) {
    VerifierExample example;
    example.question = question;
    std::span<const Sentence> prefix{segmented.sentences.data(), t - 1};
    example.formatted_input = format_verifier_input(prefix, segmented.sentences[t - 1]);
    example.label = ExampleLabel::True;
    example.stage = static_cast<int>(t);
    example.provenance = Provenance::ReferenceTrue;
    examples.push_back(std::move(example));
  }
  return examples;
}

std::string falsify(const std::string& question, const std::string& prefix,
                    const std::string& sentence, Backend& backend, double temperature,
                    const PromptLibrary& prompts) {
  ModelRequest request;
  request.role = Role::Generate;
  request.prompt = prompts.render("falsify", {{"question", question},
                                              {"answer", prefix},
                                              {"sentence", sentence}});
  request.temperature = temperature;
  request.max_tokens = 256;
  ModelResponse response = call(backend, request);
  std::string text{trim(response.text)};
  if (text.empty()) throw EmptyModelOutput("falsifier returned empty output");
  return text;
}

DatagenOutcome build_corpus(const std::vector<SourceRecord>& records, Backend& backend,
                            const DatagenConfig& config) {
  DatagenOutcome outcome;
  const PromptLibrary& prompts = config.library();
  for (std::size_t index = 0; index < records.size(); ++index) {
    const SourceRecord& record = records[index];
    try {
      SegmentedAnswer segmented = segment(record.answer);
      if (segmented.empty()) {
        throw EmptyAnswer("record " + std::to_string(index) + " has no sentences");
      }
      for (std::size_t t = 1; t <= segmented.size(); ++t) {
        std::span<const Sentence> prefix{segmented.sentences.data(), t - 1};
        const Sentence& candidate = segmented.sentences[t - 1];
        const std::string prefix_text = joined_prefix(segmented.sentences, t - 1);

        VerifierExample true_example;
        true_example.question = record.question;
        true_example.formatted_input = format_verifier_input(prefix, candidate);
        true_example.label = ExampleLabel::True;
        true_example.stage = static_cast<int>(t);
        true_example.provenance = Provenance::ReferenceTrue;
        outcome.examples.push_back(std::move(true_example));

        for (int p = 0; p < config.paraphrases_per_stage; ++p) {
          ModelRequest request;
          request.role = Role::Generate;
          request.prompt = prompts.render(
              "paraphrase", {{"question", record.question},
                             {"answer", prefix_text},
                             {"sentence", std::string(candidate.trimmed())}});
          request.max_tokens = config.max_tokens;
          ModelResponse response = call(backend, request);
          std::string text{trim(response.text)};
          if (text.empty()) throw EmptyModelOutput("paraphrase returned empty output");
          VerifierExample example;
          example.question = record.question;
          example.formatted_input =
              format_verifier_input(prefix, Sentence::detached(text));
          example.label = ExampleLabel::True;
          example.stage = static_cast<int>(t);
          example.provenance = Provenance::Paraphrase;
          outcome.examples.push_back(std::move(example));
        }

        for (double temperature : config.temperatures) {
          std::string lie =
              falsify(record.question, prefix_text,
                      std::string(candidate.trimmed()), backend, temperature, prompts);
          VerifierExample example;
          example.question = record.question;
          example.formatted_input =
              format_verifier_input(prefix, Sentence::detached(lie));
          example.label = ExampleLabel::False;
          example.stage = static_cast<int>(t);
          example.provenance = Provenance::Falsified;
          example.temperature_used = temperature;
          outcome.examples.push_back(std::move(example));
        }
      }
    } catch (const Error& e) {
      outcome.failures.push_back({index, e.what()});
    }
  }
  return outcome;
}

void write_examples(const std::filesystem::path& path,
                    const std::vector<VerifierExample>& examples) {
  std::string content;
  for (const VerifierExample& example : examples) {
    json doc{{"question", example.question},
             {"input", example.formatted_input},
             {"label", std::string(label_name(example.label))},
             {"stage", example.stage},
             {"provenance", std::string(provenance_name(example.provenance))}};
    if (example.temperature_used) {
      doc["temperature"] = *example.temperature_used;
    } else {
      doc["temperature"] = nullptr;
    }
    content += doc.dump();
    content += '\n';
  }
  atomic_write(path, content);
}

std::vector<VerifierExample> read_examples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.good()) throw IoError("cannot read examples: " + path.string());
  std::vector<VerifierExample> examples;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json doc = json::parse(line);
    VerifierExample example;
    example.question = doc.at("question").get<std::string>();
    example.formatted_input = doc.at("input").get<std::string>();
    example.label = label_from_name(doc.at("label").get<std::string>());
    example.stage = doc.at("stage").get<int>();
    example.provenance = provenance_from_name(doc.at("provenance").get<std::string>());
    if (doc.contains("temperature") && !doc.at("temperature").is_null()) {
      example.temperature_used = doc.at("temperature").get<double>();
    }
    examples.push_back(std::move(example));
  }
  return examples;
}

SourceLoad load_source_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.good()) throw IoError("cannot open source records: " + path.string());
  SourceLoad load;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    try {
      json doc = json::parse(line);
      SourceRecord record;
      record.question = doc.at("question").get<std::string>();
      record.answer = doc.at("answer").get<std::string>();
      if (record.question.empty()) throw ConfigError("missing field: question");
      load.records.push_back(std::move(record));
    } catch (const json::exception& e) {
      load.issues.push_back({line_number, e.what()});
    } catch (const ConfigError& e) {
      load.issues.push_back({line_number, e.what()});
    }
  }
  return load;
}

}  // namespace streamvr
