#include "ringgate/text.hpp"

#include <algorithm>
#include <cctype>

namespace ringgate {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

}  // namespace

std::vector<std::string> normalize_tokens(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (start == i) continue;
    std::string_view raw = text.substr(start, i - start);
    size_t lo = 0;
    size_t hi = raw.size();
    while (lo < hi && !is_word_char(static_cast<unsigned char>(raw[lo]))) ++lo;
    while (hi > lo && !is_word_char(static_cast<unsigned char>(raw[hi - 1]))) --hi;
    if (lo == hi) continue;
    std::string tok;
    tok.reserve(hi - lo);
    for (size_t k = lo; k < hi; ++k) {
      tok.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(raw[k]))));
    }
    out.push_back(std::move(tok));
  }
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

int edit_distance(std::string_view a, std::string_view b) {
  const size_t n = a.size();
  const size_t m = b.size();
  std::vector<int> prev(m + 1);
  std::vector<int> cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace ringgate
