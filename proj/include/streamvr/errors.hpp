#pragma once

#include <stdexcept>
#include <string>

namespace streamvr {

// Base for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// HTTP backend failure that survived the retry policy.
class NetworkError : public Error {
 public:
  using Error::Error;
};

// Verifier output matched neither the accepted true nor false surface forms.
class VerdictParseError : public Error {
 public:
  using Error::Error;
};

// Scripted backend had no matching rule and fall-through was disabled
// (or no default exists for the requested role).
class ScriptMiss : public Error {
 public:
  using Error::Error;
};

// A metric was evaluated outside its domain (e.g. efficiency with t_f = 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Event-simulation trace contradicts itself or its parameters.
class InconsistentTrace : public Error {
 public:
  using Error::Error;
};

// Reference answer segmented to zero sentences.
class EmptyAnswer : public Error {
 public:
  using Error::Error;
};

// Model returned an empty (all-whitespace) completion where text is required.
class EmptyModelOutput : public Error {
 public:
  using Error::Error;
};

// Wraps a provider error with the pipeline step it occurred at. Step numbers
// are 1-based; 0 means the whole-answer stage.
class PipelineError : public Error {
 public:
  PipelineError(const std::string& what, int step)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

}  // namespace streamvr
