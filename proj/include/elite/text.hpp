#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by prompt rendering and parsing.
namespace elite::text {

bool is_space(char c);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Lowercase ASCII, collapse whitespace runs to one space, trim.
std::string collapse_whitespace(std::string_view s);

// Drops every whitespace byte and lowercases ASCII.
std::string squash(std::string_view s);

// Number of UTF-8 code points (invalid bytes count as one each).
std::size_t utf8_length(std::string_view s);

// Keeps at most `max_chars` code points; never splits a multi-byte sequence.
std::string utf8_truncate(std::string_view s, std::size_t max_chars);

// Truncates and appends `marker` when the text was longer than max_chars.
std::string clip(std::string_view s, std::size_t max_chars,
                 std::string_view marker = "...");

std::vector<std::string> split_lines(std::string_view s);

bool contains(std::string_view haystack, std::string_view needle);

}  // namespace elite::text
