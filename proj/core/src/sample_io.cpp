#include "mixed_reward/sample_io.hpp"

#include <cmath>
#include <string>

#include "mixed_reward/answer_parsing.hpp"
#include "mixed_reward/text_util.hpp"

namespace mixed_reward {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, "field '" + field + "': " + what, std::nullopt, field);
}

const json& require(const json& object, const char* field) {
  const auto it = object.find(field);
  if (it == object.end()) schema_error(field, "missing");
  return *it;
}

std::string require_string(const json& object, const char* field) {
  const auto& value = require(object, field);
  if (!value.is_string()) schema_error(field, "expected a string");
  return value.get<std::string>();
}

GroundTruth ground_truth_from_string(const std::string& text, DataType declared) {
  auto mismatch = [&]() -> GroundTruth {
    throw Error(ErrorCode::TypeMismatch,
                "ground truth \"" + text + "\" does not parse as " + std::string(to_string(declared)),
                std::nullopt, "ground_truth");
  };
  switch (declared) {
    case DataType::Yorn:
      if (auto v = parse_yesno(text)) return YesNoTruth{*v};
      return mismatch();
    case DataType::Mcq: {
      const auto trimmed = trim(text);
      if (trimmed.size() == 1 && is_ascii_alpha(trimmed[0])) return ChoiceTruth{ascii_upper(trimmed[0])};
      if (auto v = parse_choice(text)) return ChoiceTruth{*v};
      return mismatch();
    }
    case DataType::Chart:
      if (auto v = parse_number(text)) return ChartTruth{*v};
      return mismatch();
    case DataType::Iou:
      if (auto v = parse_bbox(text)) return *v;
      return mismatch();
    case DataType::OpenEnded:
      return ReferenceTruth{text};
  }
  return mismatch();
}

GroundTruth ground_truth_from_json(const json& value, DataType declared) {
  if (value.is_boolean()) return YesNoTruth{value.get<bool>()};
  if (value.is_number()) return ChartTruth{value.get<double>()};
  if (value.is_string()) return ground_truth_from_string(value.get<std::string>(), declared);
  if (value.is_array()) {
    if (value.size() != 4) schema_error("ground_truth", "bounding box needs exactly 4 numbers");
    double c[4];
    for (std::size_t i = 0; i < 4; ++i) {
      if (!value[i].is_number()) schema_error("ground_truth", "bounding box coordinates must be numbers");
      c[i] = value[i].get<double>();
    }
    return BoundingBox{c[0], c[1], c[2], c[3]};
  }
  schema_error("ground_truth", "expected bool, string, number or [x1, y1, x2, y2]");
}

}  // namespace

Sample sample_from_json(const json& object) {
  if (!object.is_object()) schema_error("<root>", "expected a JSON object");
  Sample sample;
  sample.id = require_string(object, "id");

  const std::string type_name = require_string(object, "data_type");
  const auto type = parse_data_type(type_name);
  if (!type) schema_error("data_type", "unknown data type '" + type_name + "'");
  sample.data_type = *type;

  if (object.contains("question")) {
    const auto& q = object["question"];
    if (!q.is_string()) schema_error("question", "expected a string");
    sample.question = q.get<std::string>();
  } else {
    schema_error("question", "missing");
  }

  sample.ground_truth = ground_truth_from_json(require(object, "ground_truth"), sample.data_type);

  const auto& responses = require(object, "responses");
  if (!responses.is_array()) schema_error("responses", "expected an array of strings");
  sample.responses.reserve(responses.size());
  for (const auto& r : responses) {
    if (!r.is_string()) schema_error("responses", "expected an array of strings");
    sample.responses.push_back(r.get<std::string>());
  }
  return sample;
}

json ground_truth_to_json(const GroundTruth& truth) {
  return std::visit(
      [](const auto& t) -> json {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, YesNoTruth>) {
          return t.value;
        } else if constexpr (std::is_same_v<T, ChoiceTruth>) {
          return std::string(1, t.letter);
        } else if constexpr (std::is_same_v<T, ChartTruth>) {
          return t.value;
        } else if constexpr (std::is_same_v<T, BoundingBox>) {
          return json::array({t.x1, t.y1, t.x2, t.y2});
        } else {
          return t.text;
        }
      },
      truth);
}

json sample_to_json(const Sample& sample) {
  json out = json::object();
  out["id"] = sample.id;
  out["data_type"] = std::string(to_string(sample.data_type));
  out["question"] = sample.question;
  out["ground_truth"] = ground_truth_to_json(sample.ground_truth);
  out["responses"] = sample.responses;
  return out;
}

json breakdown_to_json(const RewardBreakdown& b) {
  json out = json::object();
  out["format_reward"] = b.format_reward;
  out["task_reward"] = b.task_reward;
  out["final_reward"] = b.final_reward;
  out["task_kind"] = std::string(to_string(b.task_kind));
  out["parse_ok"] = b.parse_ok;
  out["notes"] = b.notes ? json(*b.notes) : json(nullptr);
  return out;
}

Sample parse_sample_line(std::string_view line, std::size_t line_no) {
  json object;
  try {
    object = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::JsonSyntax, "line " + std::to_string(line_no) + ": " + e.what(), line_no);
  }
  try {
    return sample_from_json(object);
  } catch (const Error& e) {
    throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what(), line_no, e.field());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, "line " + std::to_string(line_no) + ": " + e.what(), line_no);
  }
}

std::optional<SampleRecord> SampleReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    try {
      return SampleRecord{line_no_, parse_sample_line(line, line_no_)};
    } catch (const Error& e) {
      return SampleRecord{line_no_, e};
    }
  }
  return std::nullopt;
}

std::vector<SampleRecord> read_samples(std::istream& in) {
  SampleReader reader(in);
  std::vector<SampleRecord> out;
  while (auto record = reader.next()) out.push_back(std::move(*record));
  return out;
}

void write_samples(std::ostream& out, std::span<const Sample> samples) {
  for (const auto& sample : samples) out << sample_to_json(sample).dump() << '\n';
}

}  // namespace mixed_reward
