#pragma once

#include <optional>
#include <string_view>

#include <json.hpp>

namespace elite {

// First balanced {...} in `text` that parses as a JSON object, tolerating
// surrounding prose and code fences. Never throws. Candidates nested deeper
// than max_depth are skipped.
std::optional<nlohmann::json> extract_first_object(std::string_view text,
                                                   int max_depth = 64);

}  // namespace elite
