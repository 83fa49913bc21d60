#include "mixed_reward/scalar_rewards.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixed_reward/answer_parsing.hpp"
#include "mixed_reward/bmas_reward.hpp"
#include "mixed_reward/error.hpp"

namespace mixed_reward {

TaskReward matching_reward(std::string_view answer, const YesNoTruth& truth) {
  const auto parsed = parse_yesno(answer);
  if (!parsed) return {0.0, DataType::Yorn, false};
  return {*parsed == truth.value ? 1.0 : 0.0, DataType::Yorn, true};
}

TaskReward matching_reward(std::string_view answer, const ChoiceTruth& truth) {
  const auto parsed = parse_choice(answer);
  if (!parsed) return {0.0, DataType::Mcq, false};
  return {*parsed == truth.letter ? 1.0 : 0.0, DataType::Mcq, true};
}

TaskReward chart_reward(std::string_view answer, double truth, const ScoreConfig& config) {
  const auto parsed = parse_number(answer);
  if (!parsed) return {0.0, DataType::Chart, false};
  double tolerance = config.chart_tolerance;
  if (config.chart_tolerance_mode == ChartToleranceMode::Relative) {
    tolerance *= std::max(1.0, std::abs(truth));
  }
  const bool correct = std::abs(*parsed - truth) < tolerance;
  return {correct ? 1.0 : 0.0, DataType::Chart, true};
}

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double inter_w = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double inter_h = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = inter_w * inter_h;
  const double uni = a.area() + b.area() - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

TaskReward iou_reward(std::string_view answer, const BoundingBox& truth) {
  const auto parsed = parse_bbox(answer);
  if (!parsed) return {0.0, DataType::Iou, false};
  return {iou(*parsed, truth), DataType::Iou, true};
}

double combine(const TaskReward& task, int format, const ScoreConfig& config) noexcept {
  return task.value + config.lambda * static_cast<double>(format);
}

namespace {

struct OpenEndedResult {
  double value;
  bool parse_ok;
  const char* note;
};

OpenEndedResult open_ended_reward(std::string_view answer, const ReferenceTruth& truth, const ScoreConfig& config,
                                  const Embedder* embedder) {
  if (embedder == nullptr) {
    throw Error(ErrorCode::EmbedderUnavailable, "open-ended scoring requires an embedding table");
  }
  const auto response_ids = embedder->tokenize(answer);
  const auto reference_ids = embedder->tokenize(truth.text);
  if (response_ids.empty() || reference_ids.empty()) {
    return {0.0, false, "empty tokenization"};
  }
  const auto& table = embedder->table();
  switch (config.open_reward_variant) {
    case OpenRewardVariant::Bmas:
      return {bmas_score(similarity_matrix(response_ids, reference_ids, table)), true, nullptr};
    case OpenRewardVariant::Bipartite:
      return {bipartite_score(similarity_matrix(response_ids, reference_ids, table)), true, nullptr};
    case OpenRewardVariant::Meanpool:
      try {
        return {meanpool_cosine(response_ids, reference_ids, table), true, nullptr};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroMeanVector) throw;
        return {0.0, false, "zero mean embedding"};
      }
  }
  return {0.0, false, nullptr};
}

}  // namespace

RewardBreakdown score_response(const Sample& sample, std::string_view response, const ScoreConfig& config,
                               const Embedder* embedder) {
  const auto tagged = extract_tagged(response);
  const std::string answer = tagged.well_formed ? *tagged.answer : std::string(response);

  RewardBreakdown out;
  out.format_reward = tagged.well_formed ? 1 : 0;
  out.task_kind = sample.data_type;

  TaskReward task{0.0, sample.data_type, false};
  std::optional<std::string> note;
  std::visit(
      [&](const auto& truth) {
        using T = std::decay_t<decltype(truth)>;
        if constexpr (std::is_same_v<T, YesNoTruth> || std::is_same_v<T, ChoiceTruth>) {
          task = matching_reward(answer, truth);
        } else if constexpr (std::is_same_v<T, ChartTruth>) {
          task = chart_reward(answer, truth.value, config);
        } else if constexpr (std::is_same_v<T, BoundingBox>) {
          task = iou_reward(answer, truth);
        } else {
          const auto result = open_ended_reward(answer, truth, config, embedder);
          task = {result.value, DataType::OpenEnded, result.parse_ok};
          if (result.note != nullptr) note = result.note;
        }
      },
      sample.ground_truth);

  if (!task.parse_ok && !note) note = "answer not parseable";
  out.task_reward = task.value;
  out.parse_ok = task.parse_ok;
  out.final_reward = combine(task, out.format_reward, config);
  out.notes = std::move(note);
  return out;
}

}  // namespace mixed_reward
