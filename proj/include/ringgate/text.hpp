#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ringgate {

// Canonical tokenization used everywhere words are compared: lowercase,
// split on whitespace, strip non-alphanumeric characters from token edges.
// Idempotent; tokens that become empty are dropped.
std::vector<std::string> normalize_tokens(std::string_view text);

// Joins tokens with single spaces.
std::string join_tokens(const std::vector<std::string>& tokens);

// Word-level Levenshtein edit distance.
int edit_distance(std::string_view a, std::string_view b);

}  // namespace ringgate
