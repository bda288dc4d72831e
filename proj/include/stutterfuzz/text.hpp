#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace stutterfuzz::text {

// Lowercase, drop punctuation except apostrophes between two letters/digits,
// collapse whitespace runs to one space, trim.
std::string normalize(std::string_view raw);

// Tokens of normalize(raw), split on spaces.
std::vector<std::string> tokenize(std::string_view raw);

std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

}  // namespace stutterfuzz::text
