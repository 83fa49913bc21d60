#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mixed_reward/core_model.hpp"
#include "mixed_reward/error.hpp"

namespace mixed_reward {

/// Decodes one samples.jsonl object. The ground truth is typed by its JSON
/// value (bool -> yorn, number -> chart, 4-array -> iou); strings are parsed
/// with the grammar of the declared data_type, so "B" is an mcq letter and
/// "yes" a yorn answer. Throws SchemaViolation for missing or ill-typed
/// fields and TypeMismatch when a string ground truth does not parse as the
/// declared type. The result is not yet validated.
Sample sample_from_json(const nlohmann::json& object);

nlohmann::json sample_to_json(const Sample& sample);
nlohmann::json ground_truth_to_json(const GroundTruth& truth);
nlohmann::json breakdown_to_json(const RewardBreakdown& breakdown);

/// One line of input: either a decoded sample or the error it produced.
struct SampleRecord {
  std::size_t line_no = 0;
  std::variant<Sample, Error> value;

  bool ok() const noexcept { return value.index() == 0; }
  const Sample& sample() const { return std::get<Sample>(value); }
  const Error& error() const { return std::get<Error>(value); }
};

/// Streams samples.jsonl one line at a time. Blank lines are skipped; a bad
/// line yields an error record and reading continues with the next line.
class SampleReader {
 public:
  explicit SampleReader(std::istream& in) : in_(in) {}

  std::optional<SampleRecord> next();

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

/// Decodes a single JSONL line; throws JsonSyntax / SchemaViolation /
/// TypeMismatch tagged with `line_no`.
Sample parse_sample_line(std::string_view line, std::size_t line_no);

std::vector<SampleRecord> read_samples(std::istream& in);
void write_samples(std::ostream& out, std::span<const Sample> samples);

}  // namespace mixed_reward
