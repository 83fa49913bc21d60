#pragma once

#include <string_view>

#include "mixed_reward/core_model.hpp"

namespace mixed_reward {

class Embedder;

/// A task reward with the data type that produced it. Failed answer
/// extraction yields parse_ok = false and value 0.
struct TaskReward {
  double value = 0.0;
  DataType kind = DataType::Yorn;
  bool parse_ok = false;

  friend bool operator==(const TaskReward&, const TaskReward&) = default;
};

TaskReward matching_reward(std::string_view answer, const YesNoTruth& truth);
TaskReward matching_reward(std::string_view answer, const ChoiceTruth& truth);

/// 1 iff |pred - truth| < tolerance (absolute mode) or
/// |pred - truth| < tolerance * max(1, |truth|) (relative mode).
/// A difference exactly at the tolerance scores 0.
TaskReward chart_reward(std::string_view answer, double truth, const ScoreConfig& config);

/// Intersection over union of two canonical boxes; 0 when the union is empty.
double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

TaskReward iou_reward(std::string_view answer, const BoundingBox& truth);

/// task + lambda * format.
double combine(const TaskReward& task, int format, const ScoreConfig& config) noexcept;

/// Scores one response of a validated sample. `embedder` is only consulted
/// for open-ended samples; passing nullptr there throws EmbedderUnavailable.
RewardBreakdown score_response(const Sample& sample, std::string_view response, const ScoreConfig& config,
                               const Embedder* embedder);

}  // namespace mixed_reward
