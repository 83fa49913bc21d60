#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mixed_reward {

/// Question category; selects which task reward scores a response.
/// The enumerator order matches the alternative order of GroundTruth.
enum class DataType { Yorn = 0, Mcq = 1, Chart = 2, Iou = 3, OpenEnded = 4 };

inline constexpr std::array<DataType, 5> kAllDataTypes{DataType::Yorn, DataType::Mcq, DataType::Chart,
                                                       DataType::Iou, DataType::OpenEnded};

/// Lowercase wire name: "yorn", "mcq", "chart", "iou", "open_ended".
std::string_view to_string(DataType type) noexcept;
std::optional<DataType> parse_data_type(std::string_view name) noexcept;

/// Axis-aligned box in the dataset's pixel units.
struct BoundingBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  /// Same box with x1 <= x2 and y1 <= y2.
  BoundingBox canonical() const noexcept;
  bool is_canonical() const noexcept { return x1 <= x2 && y1 <= y2; }
  bool is_finite() const noexcept;
  double width() const noexcept;
  double height() const noexcept;
  double area() const noexcept { return width() * height(); }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct YesNoTruth {
  bool value = false;
  friend bool operator==(const YesNoTruth&, const YesNoTruth&) = default;
};

struct ChoiceTruth {
  char letter = 'A';
  friend bool operator==(const ChoiceTruth&, const ChoiceTruth&) = default;
};

struct ChartTruth {
  double value = 0.0;
  friend bool operator==(const ChartTruth&, const ChartTruth&) = default;
};

struct ReferenceTruth {
  std::string text;
  friend bool operator==(const ReferenceTruth&, const ReferenceTruth&) = default;
};

using GroundTruth = std::variant<YesNoTruth, ChoiceTruth, ChartTruth, BoundingBox, ReferenceTruth>;

/// The data type a ground-truth alternative belongs to.
DataType data_type_of(const GroundTruth& truth) noexcept;

/// One training question with its pre-generated rollout responses.
struct Sample {
  std::string id;
  DataType data_type = DataType::Yorn;
  std::string question;
  GroundTruth ground_truth;
  std::vector<std::string> responses;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Reward of one response. final_reward = task_reward + lambda * format_reward.
struct RewardBreakdown {
  int format_reward = 0;
  double task_reward = 0.0;
  double final_reward = 0.0;
  DataType task_kind = DataType::Yorn;
  bool parse_ok = false;
  std::optional<std::string> notes;

  friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

enum class ChartToleranceMode { Absolute, Relative };
enum class ZeroStdPolicy { Zeros, Error };
enum class OpenRewardVariant { Bmas, Bipartite, Meanpool };

std::string_view to_string(OpenRewardVariant variant) noexcept;

// Rollout settings used when the scored responses were generated. Recorded
// for provenance only; nothing in the engine samples or trains.
inline constexpr double kRolloutTemperature = 1.0;
inline constexpr double kPolicyLearningRate = 3e-6;

struct ScoreConfig {
  double lambda = 0.5;
  double chart_tolerance = 1e-2;
  ChartToleranceMode chart_tolerance_mode = ChartToleranceMode::Absolute;
  int g = 8;
  double epsilon_clip = 0.2;
  double beta_kl = 0.04;
  ZeroStdPolicy zero_std_policy = ZeroStdPolicy::Zeros;
  OpenRewardVariant open_reward_variant = OpenRewardVariant::Bmas;
};

/// Throws Error(InvalidConfig) unless lambda >= 0, chart_tolerance > 0,
/// g >= 2, 0 < epsilon < 1 and beta >= 0.
void validate_config(const ScoreConfig& config);

/// Canonicalizes a sample: trims id, question, responses and reference text,
/// and reorders bounding-box corners. Throws EmptyId, NoResponses,
/// TypeMismatch or InvalidGroundTruth. Idempotent.
Sample validate_sample(Sample sample);

}  // namespace mixed_reward
