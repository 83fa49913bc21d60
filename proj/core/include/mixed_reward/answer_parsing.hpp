#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "mixed_reward/core_model.hpp"

namespace mixed_reward {

/// Result of splitting a response into its reasoning and answer sections.
///
/// A response is well formed iff, after trimming outer whitespace, it reads
///   <think> T </think> W <answer> A </answer>
/// with every tag present exactly once and W whitespace only. For malformed
/// responses `think` and `answer` hold the contents of the first matching
/// tag pair of each kind, when one exists.
struct TaggedResponse {
  std::optional<std::string> think;
  std::optional<std::string> answer;
  bool well_formed = false;

  friend bool operator==(const TaggedResponse&, const TaggedResponse&) = default;
};

TaggedResponse extract_tagged(std::string_view response);

/// 1 iff the response is well formed, else 0.
int format_reward(std::string_view response);

/// Text the task parsers consume: the answer section of a well-formed
/// response, the whole response otherwise.
std::string answer_text(std::string_view response);

// The parsers below are total and use first-match semantics.

/// First standalone letter (whole string, or delimited by non-alphanumerics),
/// uppercased. "(c) because" -> 'C', "cat" -> none.
std::optional<char> parse_choice(std::string_view answer);

/// "yes" -> true, "no" -> false, judged on the first word after lowercasing
/// and stripping surrounding punctuation.
std::optional<bool> parse_yesno(std::string_view answer);

/// First decimal literal. Thousands separators are removed and attached
/// suffixes such as "%" are ignored without rescaling.
std::optional<double> parse_number(std::string_view answer);

/// First bracketed group holding exactly four decimal literals,
/// canonicalized. Matches inside JSON such as {"bbox_2d": [1, 2, 3, 4]}.
std::optional<BoundingBox> parse_bbox(std::string_view answer);

}  // namespace mixed_reward
