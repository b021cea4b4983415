#include "streamvr/prompts.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include "streamvr/errors.hpp"

namespace streamvr {

namespace {

constexpr const char* kFalsify =
    "You will be given a question (Q) with its corresponding answer paragraph (A) "
    "that may be incomplete and a sentence (S) following the paragraph.\n"
    "\n"
    "Q: {question}\n"
    "A: {answer}\n"
    "S: {sentence}\n"
    "\n"
    "You should modify the given sentence S, into a plausible lie by inserting "
    "some wrong information. Just return only the modified sentence (S) itself.";

constexpr const char* kParaphrase =
    "You will be given a question (Q) with its corresponding answer paragraph (A) "
    "that may be incomplete and a sentence (S) following the paragraph.\n"
    "\n"
    "Q: {question}\n"
    "A: {answer}\n"
    "S: {sentence}\n"
    "\n"
    "Rewrite the sentence S so that it keeps exactly the same facts and meaning "
    "in different words. Just return only the rewritten sentence itself.";

constexpr const char* kRefineSentence =
    "Rewrite one sentence inside an answer that is still being written.\n"
    "\n"
    "Question: {question}\n"
    "{context_block}"
    "Verified answer so far: {prefix}\n"
    "Sentence to rewrite: {sentence}\n"
    "\n"
    "Rewrite only that sentence so it is factually correct and fits the answer "
    "so far. Return only the replacement sentence.";

constexpr const char* kRefineAnswer =
    "Rewrite an answer that was judged incorrect.\n"
    "\n"
    "Question: {question}\n"
    "{context_block}"
    "Answer: {answer}\n"
    "\n"
    "Rewrite the answer so it is factually correct. Return only the corrected "
    "answer.";

constexpr const char* kVerifyContext =
    "Judge whether the final sentence (the part after [SEP]) of the given text "
    "is factually correct given everything before it. Reply with exactly True "
    "or False.\n"
    "{question_block}";

constexpr const char* kGenerateClosedBook =
    "Answer the following question concisely and factually.\n"
    "\n"
    "Question: {question}\n"
    "Answer:";

constexpr const char* kGenerateOpenBook =
    "Answer the following question using the provided passages.\n"
    "\n"
    "{passages}"
    "Question: {question}\n"
    "Answer:";

constexpr const char* kGenerateFewShot =
    "Answer the final question in the style of the examples.\n"
    "\n"
    "{examples}"
    "Question: {question}\n"
    "Answer:";

constexpr const char* kContinueAnswer =
    "Continue the answer below from where it stops. Return only the "
    "continuation.\n"
    "\n"
    "Question: {question}\n"
    "{context_block}"
    "Answer so far: {prefix}";

}  // namespace

std::string render_template(std::string_view text,
                            const std::map<std::string, std::string>& slots) {
  std::string out(text);
  for (const auto& [key, value] : slots) {
    const std::string needle = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = out.find(needle, pos)) != std::string::npos) {
      out.replace(pos, needle.size(), value);
      pos += value.size();
    }
  }
  return out;
}

const PromptLibrary& PromptLibrary::builtin() {
  static const PromptLibrary lib = [] {
    PromptLibrary l;
    struct Entry {
      const char* name;
      const char* text;
    };
    const Entry entries[] = {
        {"falsify", kFalsify},
        {"paraphrase", kParaphrase},
        {"refine_sentence", kRefineSentence},
        {"refine_answer", kRefineAnswer},
        {"verify_context", kVerifyContext},
        {"generate_closed_book", kGenerateClosedBook},
        {"generate_open_book", kGenerateOpenBook},
        {"generate_few_shot", kGenerateFewShot},
        {"continue_answer", kContinueAnswer},
    };
    for (const auto& e : entries) {
      l.templates_[e.name] = PromptTemplate{e.name, 1, e.text};
    }
    return l;
  }();
  return lib;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  PromptLibrary lib = builtin();
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("template directory not found: " + dir.string());
  }
  const std::regex name_re(R"(^(.+)\.v(\d+)\.txt$)");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::smatch m;
    const std::string fname = entry.path().filename().string();
    if (!std::regex_match(fname, m, name_re)) continue;
    std::string name = m[1];
    int version = std::stoi(m[2]);
    auto it = lib.templates_.find(name);
    if (it != lib.templates_.end() && it->second.version > version) continue;
    std::ifstream in(entry.path());
    if (!in.good()) throw IoError("cannot read template: " + entry.path().string());
    std::ostringstream body;
    body << in.rdbuf();
    std::string text = body.str();
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
      text.pop_back();
    }
    lib.templates_[name] = PromptTemplate{name, version, std::move(text)};
  }
  return lib;
}

const PromptTemplate& PromptLibrary::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    throw ConfigError("unknown prompt template: " + std::string(name));
  }
  return it->second;
}

std::string PromptLibrary::render(std::string_view name,
                                  const std::map<std::string, std::string>& slots) const {
  return render_template(get(name).text, slots);
}

}  // namespace streamvr
