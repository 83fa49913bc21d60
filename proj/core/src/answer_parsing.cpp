#include "mixed_reward/answer_parsing.hpp"

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "mixed_reward/text_util.hpp"

namespace mixed_reward {
namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t count = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

std::optional<std::string> first_pair(std::string_view text, std::string_view open, std::string_view close) {
  const auto start = text.find(open);
  if (start == std::string_view::npos) return std::nullopt;
  const auto body = start + open.size();
  const auto end = text.find(close, body);
  if (end == std::string_view::npos) return std::nullopt;
  return std::string(text.substr(body, end - body));
}

bool is_ascii_punct(char c) noexcept {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

bool is_thousands_group(std::string_view text, std::size_t pos) {
  if (pos + 3 > text.size()) return false;
  for (std::size_t k = pos; k < pos + 3; ++k) {
    if (!is_ascii_digit(text[k])) return false;
  }
  return pos + 3 == text.size() || !is_ascii_digit(text[pos + 3]);
}

// Scans one decimal literal starting exactly at `pos`. On success returns the
// literal with separators removed and sets `end` one past its last byte.
std::optional<std::string> scan_literal(std::string_view text, std::size_t pos, std::size_t& end) {
  std::string out;
  std::size_t i = pos;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    if (text[i] == '-') out.push_back('-');
    ++i;
  }
  std::size_t int_digits = 0;
  while (i < text.size()) {
    if (is_ascii_digit(text[i])) {
      out.push_back(text[i]);
      ++int_digits;
      ++i;
    } else if (text[i] == ',' && int_digits > 0 && is_thousands_group(text, i + 1)) {
      // thousands separator: exactly three digits follow
      ++i;
    } else {
      break;
    }
  }
  std::size_t frac_digits = 0;
  if (i + 1 < text.size() && text[i] == '.' && is_ascii_digit(text[i + 1])) {
    out.push_back('.');
    ++i;
    while (i < text.size() && is_ascii_digit(text[i])) {
      out.push_back(text[i]);
      ++frac_digits;
      ++i;
    }
  }
  if (int_digits == 0 && frac_digits == 0) return std::nullopt;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    std::size_t k = i + 1;
    if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
    if (k < text.size() && is_ascii_digit(text[k])) {
      out.push_back('e');
      out.append(text.substr(i + 1, k - (i + 1)));
      while (k < text.size() && is_ascii_digit(text[k])) out.push_back(text[k++]);
      i = k;
    }
  }
  end = i;
  return out;
}

std::optional<double> to_double(const std::string& literal) {
  double value = 0.0;
  const auto* first = literal.data();
  const auto* last = literal.data() + literal.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

// A literal may start at a digit, at '.' before a digit, or at a sign that
// is not glued to a preceding word.
bool literal_may_start(std::string_view text, std::size_t i) {
  const char c = text[i];
  if (is_ascii_digit(c)) return true;
  if (c == '.') return i + 1 < text.size() && is_ascii_digit(text[i + 1]);
  if (c == '-' || c == '+') {
    if (i > 0 && is_word_byte(text[i - 1])) return false;
    return i + 1 < text.size() && (is_ascii_digit(text[i + 1]) || text[i + 1] == '.');
  }
  return false;
}

std::optional<double> parse_full_literal(std::string_view token) {
  token = trim(token);
  if (token.empty() || !literal_may_start(token, 0)) return std::nullopt;
  std::size_t end = 0;
  auto literal = scan_literal(token, 0, end);
  if (!literal || end != token.size()) return std::nullopt;
  return to_double(*literal);
}

}  // namespace

TaggedResponse extract_tagged(std::string_view response) {
  const std::string_view text = trim(response);
  TaggedResponse out;
  out.think = first_pair(text, kThinkOpen, kThinkClose);
  out.answer = first_pair(text, kAnswerOpen, kAnswerClose);

  if (count_occurrences(text, kThinkOpen) != 1 || count_occurrences(text, kThinkClose) != 1 ||
      count_occurrences(text, kAnswerOpen) != 1 || count_occurrences(text, kAnswerClose) != 1) {
    return out;
  }
  const auto think_open = text.find(kThinkOpen);
  const auto think_close = text.find(kThinkClose);
  const auto answer_open = text.find(kAnswerOpen);
  const auto answer_close = text.find(kAnswerClose);
  if (think_open != 0 || think_close < think_open || answer_open < think_close + kThinkClose.size() ||
      answer_close < answer_open || answer_close + kAnswerClose.size() != text.size()) {
    return out;
  }
  const auto gap = text.substr(think_close + kThinkClose.size(), answer_open - think_close - kThinkClose.size());
  if (!trim(gap).empty()) return out;

  out.well_formed = true;
  return out;
}

int format_reward(std::string_view response) { return extract_tagged(response).well_formed ? 1 : 0; }

std::string answer_text(std::string_view response) {
  auto tagged = extract_tagged(response);
  if (tagged.well_formed) return std::move(*tagged.answer);
  return std::string(response);
}

std::optional<char> parse_choice(std::string_view answer) {
  for (std::size_t i = 0; i < answer.size(); ++i) {
    if (!is_ascii_alpha(answer[i])) continue;
    const bool left_ok = i == 0 || !is_word_byte(answer[i - 1]);
    const bool right_ok = i + 1 == answer.size() || !is_word_byte(answer[i + 1]);
    if (left_ok && right_ok) return ascii_upper(answer[i]);
  }
  return std::nullopt;
}

std::optional<bool> parse_yesno(std::string_view answer) {
  auto strip = [](std::string_view s) {
    while (!s.empty() && (is_ascii_space(s.front()) || is_ascii_punct(s.front()))) s.remove_prefix(1);
    while (!s.empty() && (is_ascii_space(s.back()) || is_ascii_punct(s.back()))) s.remove_suffix(1);
    return s;
  };
  std::string_view rest = strip(answer);
  std::size_t end = 0;
  while (end < rest.size() && !is_ascii_space(rest[end])) ++end;
  const std::string word = ascii_lowercase(strip(rest.substr(0, end)));
  if (word == "yes") return true;
  if (word == "no") return false;
  return std::nullopt;
}

std::optional<double> parse_number(std::string_view answer) {
  for (std::size_t i = 0; i < answer.size(); ++i) {
    if (!literal_may_start(answer, i)) continue;
    std::size_t end = 0;
    auto literal = scan_literal(answer, i, end);
    if (!literal) continue;
    return to_double(*literal);
  }
  return std::nullopt;
}

std::optional<BoundingBox> parse_bbox(std::string_view answer) {
  for (std::size_t open = answer.find('['); open != std::string_view::npos; open = answer.find('[', open + 1)) {
    const auto close = answer.find(']', open + 1);
    if (close == std::string_view::npos) return std::nullopt;
    const auto body = answer.substr(open + 1, close - open - 1);
    if (body.find('[') != std::string_view::npos) continue;

    std::vector<double> values;
    bool ok = true;
    std::size_t start = 0;
    while (ok) {
      const auto comma = body.find(',', start);
      const auto token = body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      auto value = parse_full_literal(token);
      if (!value) {
        ok = false;
        break;
      }
      values.push_back(*value);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (ok && values.size() == 4) {
      return BoundingBox{values[0], values[1], values[2], values[3]}.canonical();
    }
  }
  return std::nullopt;
}

}  // namespace mixed_reward
