#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "streamvr/segmenter.hpp"

namespace streamvr {

enum class Role { Generate, Verify, Refine };

std::string_view role_name(Role role);
Role role_from_name(std::string_view name);  // throws ConfigError

struct ModelRequest {
  Role role = Role::Generate;
  // Core payload: the generation prompt, the "[SEP]"-formatted verifier
  // input, or the rendered refinement instruction.
  std::string prompt;
  // Optional preamble (retrieved passages, few-shot examples, the verifier
  // instruction). Backends prepend it, chat backends send it as the system
  // message.
  std::optional<std::string> context;
  int max_tokens = 512;
  double temperature = 0.0;
};

struct ModelResponse {
  std::string text;
  long tokens_generated = 0;
  long tokens_prompt = 0;
  long latency_ms = 0;
  // Populated for Verify-role responses only.
  std::optional<bool> verdict;
};

// A model endpoint serving any of the three roles. Implementations must be
// safe for concurrent invoke() calls; pipeline ordering is imposed by the
// caller, never here.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual ModelResponse invoke(const ModelRequest& request) = 0;
  virtual std::string name() const = 0;
};

// Dispatches a request and applies the role contract: Verify responses get
// their verdict parsed from the response text unless the backend already
// set one. Throws VerdictParseError when a Verify response matches neither
// surface form.
ModelResponse call(Backend& backend, const ModelRequest& request);

// Maps verifier output text to a boolean: the first alphabetic token,
// case-insensitive, decides ("true"/"yes" vs "false"/"no").
bool parse_verdict(std::string_view text);

// Builds the verifier input for a candidate sentence after a finalized
// prefix: trimmed sentences joined by single spaces with the literal token
// "[SEP]" immediately before the candidate. An empty prefix yields
// "[SEP] <candidate>".
std::string format_verifier_input(std::span<const Sentence> prefix,
                                  const Sentence& candidate);

// One canned behavior of the scripted backend: the rule fires when the
// request has the given role and its prompt contains `match`.
struct ScriptedRule {
  Role role = Role::Generate;
  std::string match;
  std::string text;
  std::optional<long> tokens_generated;  // default: tokenizer count (0 for Verify)
  long latency_ms = 0;
};

// Deterministic canned-response backend. Rules are checked in order, first
// match wins; otherwise the role default answers. Verify always has a
// default ("True"). With fall-through disabled, unmatched requests throw
// ScriptMiss. Immutable after construction, safe to share across threads.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::vector<ScriptedRule> rules,
                           bool allow_default = true,
                           std::string name = "scripted");

  void set_default(Role role, std::string text);

  ModelResponse invoke(const ModelRequest& request) override;
  std::string name() const override { return name_; }

 private:
  std::vector<ScriptedRule> rules_;
  std::optional<std::string> defaults_[3];
  bool allow_default_;
  std::string name_;
};

// Loads a scripted backend from its JSON file format:
//   {"rules": [{"role": "verify", "match": "...", "text": "False"}, ...],
//    "defaults": {"generate": "...", "refine": "..."},
//    "allow_default": true}
std::shared_ptr<ScriptedBackend> load_scripted_backend(const std::string& path);

// Decorator that records every exchange passing through a backend.
class RecordingBackend : public Backend {
 public:
  explicit RecordingBackend(std::shared_ptr<Backend> inner);

  ModelResponse invoke(const ModelRequest& request) override;
  std::string name() const override;

  std::vector<std::pair<ModelRequest, ModelResponse>> exchanges() const;
  void clear();

 private:
  std::shared_ptr<Backend> inner_;
  mutable std::mutex mutex_;
  std::vector<std::pair<ModelRequest, ModelResponse>> exchanges_;
};

// HTTP chat-completion backend. POSTs to <base_url>/v1/chat/completions
// with {model, messages, temperature, max_tokens}; the request context, if
// any, travels as the system message. Reads choices[0].message.content and
// prefers usage.{prompt_tokens, completion_tokens} over the local tokenizer.
// Retries per policy (exponential backoff), then throws NetworkError.
struct HttpBackendConfig {
  std::string base_url;  // empty: taken from STREAMVR_BASE_URL
  std::string api_key;   // empty: taken from STREAMVR_API_KEY
  std::string model = "default";
  int max_attempts = 3;
  int initial_backoff_ms = 250;
  int timeout_seconds = 120;
};

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);  // throws ConfigError

  ModelResponse invoke(const ModelRequest& request) override;
  std::string name() const override;

 private:
  HttpBackendConfig config_;
  std::string scheme_host_;  // scheme://host[:port]
  std::string path_prefix_;  // path part of base_url, if any
};

}  // namespace streamvr
