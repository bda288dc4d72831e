#include "stutterfuzz/text.hpp"

#include <cctype>

namespace stutterfuzz::text {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

}  // namespace

std::string normalize(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto c = static_cast<unsigned char>(raw[i]);
    bool keep = is_word_char(c);
    if (c == '\'') {
      const bool left = i > 0 && is_word_char(static_cast<unsigned char>(raw[i - 1]));
      const bool right = i + 1 < raw.size() && is_word_char(static_cast<unsigned char>(raw[i + 1]));
      keep = left && right;
    }
    if (keep) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (std::isspace(c) != 0) {
      pending_space = true;
    }
    // other punctuation is dropped without acting as a separator
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view raw) {
  std::vector<std::string> tokens;
  const std::string norm = normalize(raw);
  std::size_t pos = 0;
  while (pos < norm.size()) {
    const auto next = norm.find(' ', pos);
    const auto end = next == std::string::npos ? norm.size() : next;
    tokens.emplace_back(norm.substr(pos, end - pos));
    pos = end + 1;
  }
  return tokens;
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(tokens[i]);
  }
  return out;
}

}  // namespace stutterfuzz::text
