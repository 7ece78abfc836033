#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "elite/model_backend.hpp"

namespace elite {

namespace prompt_names {
inline constexpr std::string_view coarse_plan = "coarse_plan";
inline constexpr std::string_view next_action = "next_action";
inline constexpr std::string_view reflect_success = "reflect_success";
inline constexpr std::string_view reflect_failure = "reflect_failure";
inline constexpr std::string_view reflect_comparative = "reflect_comparative";
inline constexpr std::string_view consolidate = "consolidate";
}  // namespace prompt_names

// A template asset has optional leading '#' comment lines, then a
// "[system]" section and a "[user]" section. Placeholders are {{name}}.
struct PromptTemplate {
  std::string system;
  std::string user;
};

PromptTemplate parse_prompt_template(std::string_view source);

// Substitutes every {{name}}. Throws ConfigError for a placeholder with no
// value. Values are inserted verbatim and never re-scanned.
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& vars);

class PromptSet {
 public:
  // Templates compiled in from assets/prompts.
  static PromptSet defaults();

  // Defaults, with any "<name>.v1.txt" found in `dir` replacing the built-in.
  static PromptSet with_overrides(const std::filesystem::path& dir);

  const PromptTemplate& get(std::string_view name) const;

  ChatRequest render(std::string_view name,
                     const std::map<std::string, std::string>& vars,
                     int max_tokens = 1024) const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

namespace detail {
const std::map<std::string, std::string>& embedded_prompt_sources();
}

}  // namespace elite
