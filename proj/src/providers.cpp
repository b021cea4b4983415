#include "streamvr/providers.hpp"

#include <cctype>
#include <fstream>

#include "json.hpp"
#include "streamvr/errors.hpp"
#include "streamvr/text.hpp"

namespace streamvr {

std::string_view role_name(Role role) {
  switch (role) {
    case Role::Generate:
      return "generate";
    case Role::Verify:
      return "verify";
    case Role::Refine:
      return "refine";
  }
  return "unknown";
}

Role role_from_name(std::string_view name) {
  if (name == "generate") return Role::Generate;
  if (name == "verify") return Role::Verify;
  if (name == "refine") return Role::Refine;
  throw ConfigError("unknown role: " + std::string(name));
}

bool parse_verdict(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && !std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
  std::size_t begin = i;
  while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
  std::string token = to_lower(text.substr(begin, i - begin));
  if (token == "true" || token == "yes") return true;
  if (token == "false" || token == "no") return false;
  throw VerdictParseError("verifier output is neither true nor false: \"" +
                          std::string(text.substr(0, 64)) + "\"");
}

ModelResponse call(Backend& backend, const ModelRequest& request) {
  ModelResponse response = backend.invoke(request);
  if (request.role == Role::Verify && !response.verdict.has_value()) {
    response.verdict = parse_verdict(response.text);
  }
  return response;
}

std::string format_verifier_input(std::span<const Sentence> prefix,
                                  const Sentence& candidate) {
  std::string out;
  for (const Sentence& s : prefix) {
    out += s.trimmed();
    out += ' ';
  }
  out += "[SEP] ";
  out += candidate.trimmed();
  return out;
}

ScriptedBackend::ScriptedBackend(std::vector<ScriptedRule> rules, bool allow_default,
                                 std::string name)
    : rules_(std::move(rules)), allow_default_(allow_default), name_(std::move(name)) {
  defaults_[static_cast<int>(Role::Verify)] = "True";
}

void ScriptedBackend::set_default(Role role, std::string text) {
  defaults_[static_cast<int>(role)] = std::move(text);
}

ModelResponse ScriptedBackend::invoke(const ModelRequest& request) {
  const ScriptedRule* hit = nullptr;
  for (const ScriptedRule& rule : rules_) {
    if (rule.role == request.role &&
        request.prompt.find(rule.match) != std::string::npos) {
      hit = &rule;
      break;
    }
  }
  std::string text;
  std::optional<long> tokens_override;
  long latency = 0;
  if (hit != nullptr) {
    text = hit->text;
    tokens_override = hit->tokens_generated;
    latency = hit->latency_ms;
  } else {
    const auto& fallback = defaults_[static_cast<int>(request.role)];
    if (!allow_default_ || !fallback.has_value()) {
      throw ScriptMiss("no scripted rule matches " +
                       std::string(role_name(request.role)) + " request: \"" +
                       request.prompt.substr(0, 64) + "\"");
    }
    text = *fallback;
  }
  ModelResponse response;
  response.text = std::move(text);
  response.tokens_generated = tokens_override.value_or(
      request.role == Role::Verify ? 0 : count_tokens(response.text));
  std::string full_prompt =
      request.context ? *request.context + "\n" + request.prompt : request.prompt;
  response.tokens_prompt = count_tokens(full_prompt);
  response.latency_ms = latency;
  return response;
}

std::shared_ptr<ScriptedBackend> load_scripted_backend(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw IoError("cannot open script file: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid script file " + path + ": " + e.what());
  }
  std::vector<ScriptedRule> rules;
  for (const auto& r : doc.value("rules", nlohmann::json::array())) {
    ScriptedRule rule;
    rule.role = role_from_name(r.at("role").get<std::string>());
    rule.match = r.at("match").get<std::string>();
    rule.text = r.at("text").get<std::string>();
    if (r.contains("tokens_generated")) {
      rule.tokens_generated = r.at("tokens_generated").get<long>();
    }
    rule.latency_ms = r.value("latency_ms", 0L);
    rules.push_back(std::move(rule));
  }
  bool allow_default = doc.value("allow_default", true);
  auto backend = std::make_shared<ScriptedBackend>(std::move(rules), allow_default,
                                                   doc.value("name", "scripted"));
  if (doc.contains("defaults")) {
    for (const auto& [key, value] : doc.at("defaults").items()) {
      backend->set_default(role_from_name(key), value.get<std::string>());
    }
  }
  return backend;
}

RecordingBackend::RecordingBackend(std::shared_ptr<Backend> inner)
    : inner_(std::move(inner)) {}

ModelResponse RecordingBackend::invoke(const ModelRequest& request) {
  ModelResponse response = inner_->invoke(request);
  std::lock_guard lock(mutex_);
  exchanges_.emplace_back(request, response);
  return response;
}

std::string RecordingBackend::name() const { return inner_->name(); }

std::vector<std::pair<ModelRequest, ModelResponse>> RecordingBackend::exchanges()
    const {
  std::lock_guard lock(mutex_);
  return exchanges_;
}

void RecordingBackend::clear() {
  std::lock_guard lock(mutex_);
  exchanges_.clear();
}

}  // namespace streamvr
