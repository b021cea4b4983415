#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace streamvr {

struct PromptTemplate {
  std::string name;
  int version = 1;
  std::string text;
};

// Replaces every "{key}" with the slot value. Keys without a slot entry are
// left untouched; slot values are inserted verbatim.
std::string render_template(std::string_view text,
                            const std::map<std::string, std::string>& slots);

// Named, versioned prompt templates. The compiled-in set covers every role;
// a templates directory can overlay any of them with files named
// "<name>.v<N>.txt" (highest N wins per name).
class PromptLibrary {
 public:
  static const PromptLibrary& builtin();
  static PromptLibrary load(const std::filesystem::path& dir);

  const PromptTemplate& get(std::string_view name) const;  // throws ConfigError
  std::string render(std::string_view name,
                     const std::map<std::string, std::string>& slots) const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

}  // namespace streamvr
