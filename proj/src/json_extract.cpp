#include "elite/json_extract.hpp"

#include <limits>

namespace elite {

namespace {

// Index one past the brace closing the object that opens at `start`, or npos
// when the braces never balance (or nest too deeply).
std::size_t balanced_end(std::string_view text, std::size_t start, int max_depth) {
  int depth = 0;
  int brackets = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      if (++depth + brackets > max_depth) return std::string_view::npos;
    } else if (c == '[') {
      if (depth + ++brackets > max_depth) return std::string_view::npos;
    } else if (c == ']') {
      if (brackets > 0) --brackets;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

}  // namespace

std::optional<nlohmann::json> extract_first_object(std::string_view text,
                                                   int max_depth) {
  for (std::size_t start = text.find('{'); start != std::string_view::npos;
       start = text.find('{', start + 1)) {
    const auto end = balanced_end(text, start, max_depth);
    if (end == std::string_view::npos) {
      // Too deep: skip the whole region rather than its inner objects.
      const auto skip = balanced_end(text, start, std::numeric_limits<int>::max());
      if (skip == std::string_view::npos) break;
      start = skip - 1;
      continue;
    }
    auto parsed = nlohmann::json::parse(text.substr(start, end - start), nullptr,
                                        /*allow_exceptions=*/false);
    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
  }
  return std::nullopt;
}

}  // namespace elite
