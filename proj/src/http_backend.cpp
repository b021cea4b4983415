#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "streamvr/errors.hpp"
#include "streamvr/providers.hpp"
#include "streamvr/text.hpp"

namespace streamvr {

namespace {

std::string env_or_empty(const char* name) {
  const char* value = std::getenv(name);
  return value ? std::string(value) : std::string();
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) config_.base_url = env_or_empty("STREAMVR_BASE_URL");
  if (config_.api_key.empty()) config_.api_key = env_or_empty("STREAMVR_API_KEY");
  if (config_.base_url.empty()) {
    throw ConfigError("HTTP backend needs a base URL (flag, config file, or "
                      "STREAMVR_BASE_URL)");
  }
  std::size_t scheme = config_.base_url.find("://");
  if (scheme == std::string::npos) {
    throw ConfigError("base URL must include a scheme: " + config_.base_url);
  }
  std::size_t path = config_.base_url.find('/', scheme + 3);
  if (path == std::string::npos) {
    scheme_host_ = config_.base_url;
  } else {
    scheme_host_ = config_.base_url.substr(0, path);
    path_prefix_ = config_.base_url.substr(path);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }
}

std::string HttpBackend::name() const { return "http:" + scheme_host_; }

ModelResponse HttpBackend::invoke(const ModelRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  if (request.context && !request.context->empty()) {
    messages.push_back({{"role", "system"}, {"content", *request.context}});
  }
  messages.push_back({{"role", "user"}, {"content", request.prompt}});
  nlohmann::json payload = {
      {"model", config_.model},
      {"messages", messages},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };
  const std::string body = payload.dump();
  const std::string path = path_prefix_ + "/v1/chat/completions";

  std::string last_failure;
  for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
    if (attempt > 0) {
      int backoff = config_.initial_backoff_ms << (attempt - 1);
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
    }
    httplib::Client client(scheme_host_);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!config_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + config_.api_key);
    }
    auto started = std::chrono::steady_clock::now();
    httplib::Result result = client.Post(path, headers, body, "application/json");
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();
    if (!result) {
      last_failure = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status < 200 || result->status >= 300) {
      last_failure = "HTTP " + std::to_string(result->status);
      continue;
    }
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::exception& e) {
      last_failure = std::string("bad response body: ") + e.what();
      continue;
    }
    ModelResponse response;
    try {
      response.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      last_failure = std::string("unexpected response shape: ") + e.what();
      continue;
    }
    if (doc.contains("usage")) {
      const auto& usage = doc.at("usage");
      response.tokens_prompt = usage.value("prompt_tokens", 0L);
      response.tokens_generated = usage.value("completion_tokens", 0L);
    }
    if (response.tokens_prompt == 0) {
      response.tokens_prompt = count_tokens(
          request.context ? *request.context + "\n" + request.prompt : request.prompt);
    }
    if (response.tokens_generated == 0 && request.role != Role::Verify) {
      response.tokens_generated = count_tokens(response.text);
    }
    response.latency_ms = elapsed;
    return response;
  }
  throw NetworkError("request to " + scheme_host_ + path + " failed after " +
                     std::to_string(config_.max_attempts) + " attempts (" +
                     last_failure + ")");
}

}  // namespace streamvr
