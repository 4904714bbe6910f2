#pragma once

// Composite reward over generated completions: answer extraction plus five
// deterministic components. Total functions of the raw text; never
// differentiated.

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <vector>

namespace genelm {
namespace rewards {

inline constexpr const char* kThinkOpen = "<think>";
inline constexpr const char* kThinkClose = "</think>";

namespace detail {

inline std::size_t count_occurrences(const std::string& text,
                                     const std::string& needle) {
  std::size_t count = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::string lower(const std::string& s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

inline std::size_t word_count(const std::string& s) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : s) {
    bool blank = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!blank && !in_word) ++count;
    in_word = !blank;
  }
  return count;
}

}  // namespace detail

// trimmed segment after the final </think>; absent when no tag or empty
inline std::optional<std::string> extract_final_answer(const std::string& text) {
  std::size_t pos = text.rfind(kThinkClose);
  if (pos == std::string::npos) return std::nullopt;
  std::string tail = detail::trim(text.substr(pos + std::string(kThinkClose).size()));
  if (tail.empty()) return std::nullopt;
  return tail;
}

// 2.0 iff the extracted answer contains the target, case-insensitively
inline double correctness_reward(const std::string& text,
                                 const std::string& target) {
  auto answer = extract_final_answer(text);
  if (!answer) return 0.0;
  if (target.empty()) return 0.0;
  return detail::lower(*answer).find(detail::lower(target)) != std::string::npos
             ? 2.0
             : 0.0;
}

// 0.5 iff the extracted answer has four or fewer words
inline double conciseness_reward(const std::string& text) {
  auto answer = extract_final_answer(text);
  if (!answer) return 0.0;
  return detail::word_count(*answer) <= 4 ? 0.5 : 0.0;
}

// Strict pattern: optional leading whitespace, "<think>\n", body,
// "\n</think>\n", a single nonempty answer line, optional trailing
// whitespace. Exactly one tag pair.
inline double strict_format_reward(const std::string& text) {
  if (detail::count_occurrences(text, kThinkOpen) != 1) return 0.0;
  if (detail::count_occurrences(text, kThinkClose) != 1) return 0.0;
  std::size_t open = text.find(kThinkOpen);
  for (std::size_t i = 0; i < open; ++i) {
    if (!std::isspace(static_cast<unsigned char>(text[i]))) return 0.0;
  }
  std::size_t body_start = open + std::string(kThinkOpen).size();
  if (body_start >= text.size() || text[body_start] != '\n') return 0.0;
  std::size_t close = text.find(kThinkClose, body_start);
  if (close == std::string::npos || close < open) return 0.0;
  if (close == 0 || text[close - 1] != '\n') return 0.0;
  std::size_t after = close + std::string(kThinkClose).size();
  if (after >= text.size() || text[after] != '\n') return 0.0;
  std::string tail = text.substr(after + 1);
  // single answer line: no interior newline once trailing whitespace is cut
  std::size_t e = tail.size();
  while (e > 0 && std::isspace(static_cast<unsigned char>(tail[e - 1]))) --e;
  std::string answer = tail.substr(0, e);
  if (answer.empty()) return 0.0;
  if (answer.find('\n') != std::string::npos) return 0.0;
  return 0.5;
}

// Loose variant: exactly one open and one close tag, open before close,
// nonempty trailing text after the close; spacing free.
inline double soft_format_reward(const std::string& text) {
  if (detail::count_occurrences(text, kThinkOpen) != 1) return 0.0;
  if (detail::count_occurrences(text, kThinkClose) != 1) return 0.0;
  std::size_t open = text.find(kThinkOpen);
  std::size_t close = text.find(kThinkClose);
  if (close < open) return 0.0;
  std::string tail =
      detail::trim(text.substr(close + std::string(kThinkClose).size()));
  return tail.empty() ? 0.0 : 0.5;
}

// 0.125 per tag that occurs exactly once
inline double tag_count_reward(const std::string& text) {
  double r = 0.0;
  if (detail::count_occurrences(text, kThinkOpen) == 1) r += 0.125;
  if (detail::count_occurrences(text, kThinkClose) == 1) r += 0.125;
  return r;
}

struct RewardBreakdown {
  double correctness = 0.0;
  double conciseness = 0.0;
  double strict_format = 0.0;
  double soft_format = 0.0;
  double tag_count = 0.0;
  double total = 0.0;
};

inline RewardBreakdown composite_reward(const std::string& text,
                                        const std::string& target) {
  RewardBreakdown b;
  b.correctness = correctness_reward(text, target);
  b.conciseness = conciseness_reward(text);
  b.strict_format = strict_format_reward(text);
  b.soft_format = soft_format_reward(text);
  b.tag_count = tag_count_reward(text);
  b.total =
      b.correctness + b.conciseness + b.strict_format + b.soft_format + b.tag_count;
  return b;
}

}  // namespace rewards
}  // namespace genelm
