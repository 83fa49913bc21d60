#include "mixed_reward/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixed_reward/error.hpp"
#include "mixed_reward/text_util.hpp"

namespace mixed_reward {

std::string_view to_string(DataType type) noexcept {
  switch (type) {
    case DataType::Yorn: return "yorn";
    case DataType::Mcq: return "mcq";
    case DataType::Chart: return "chart";
    case DataType::Iou: return "iou";
    case DataType::OpenEnded: return "open_ended";
  }
  return "unknown";
}

std::optional<DataType> parse_data_type(std::string_view name) noexcept {
  for (DataType type : kAllDataTypes) {
    if (to_string(type) == name) return type;
  }
  return std::nullopt;
}

std::string_view to_string(OpenRewardVariant variant) noexcept {
  switch (variant) {
    case OpenRewardVariant::Bmas: return "bmas";
    case OpenRewardVariant::Bipartite: return "bipartite";
    case OpenRewardVariant::Meanpool: return "meanpool";
  }
  return "unknown";
}

BoundingBox BoundingBox::canonical() const noexcept {
  return {std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)};
}

bool BoundingBox::is_finite() const noexcept {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2);
}

double BoundingBox::width() const noexcept { return std::max(0.0, x2 - x1); }
double BoundingBox::height() const noexcept { return std::max(0.0, y2 - y1); }

DataType data_type_of(const GroundTruth& truth) noexcept {
  return static_cast<DataType>(truth.index());
}

void validate_config(const ScoreConfig& config) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) fail("lambda must be finite and >= 0");
  if (!(config.chart_tolerance > 0.0) || !std::isfinite(config.chart_tolerance))
    fail("chart tolerance must be finite and > 0");
  if (config.g < 2) fail("group size g must be >= 2");
  if (!(config.epsilon_clip > 0.0 && config.epsilon_clip < 1.0)) fail("epsilon must lie in (0, 1)");
  if (!(config.beta_kl >= 0.0) || !std::isfinite(config.beta_kl)) fail("beta must be finite and >= 0");
}

Sample validate_sample(Sample sample) {
  sample.id = std::string(trim(sample.id));
  if (sample.id.empty()) throw Error(ErrorCode::EmptyId, "sample id is empty");
  sample.question = std::string(trim(sample.question));

  if (sample.responses.empty()) {
    throw Error(ErrorCode::NoResponses, "sample '" + sample.id + "' has no responses");
  }
  for (auto& response : sample.responses) response = std::string(trim(response));

  if (data_type_of(sample.ground_truth) != sample.data_type) {
    throw Error(ErrorCode::TypeMismatch, "sample '" + sample.id + "': ground truth is " +
                                             std::string(to_string(data_type_of(sample.ground_truth))) +
                                             " but data_type is " + std::string(to_string(sample.data_type)));
  }

  auto invalid = [&](const std::string& what) {
    throw Error(ErrorCode::InvalidGroundTruth, "sample '" + sample.id + "': " + what);
  };
  std::visit(
      [&](auto& truth) {
        using T = std::decay_t<decltype(truth)>;
        if constexpr (std::is_same_v<T, ChoiceTruth>) {
          if (truth.letter < 'A' || truth.letter > 'Z') invalid("choice letter must be one of A-Z");
        } else if constexpr (std::is_same_v<T, ChartTruth>) {
          if (!std::isfinite(truth.value)) invalid("chart value must be finite");
        } else if constexpr (std::is_same_v<T, BoundingBox>) {
          if (!truth.is_finite()) invalid("bounding box coordinates must be finite");
          truth = truth.canonical();
        } else if constexpr (std::is_same_v<T, ReferenceTruth>) {
          truth.text = std::string(trim(truth.text));
          if (truth.text.empty()) invalid("reference text is empty");
        }
      },
      sample.ground_truth);
  return sample;
}

}  // namespace mixed_reward
