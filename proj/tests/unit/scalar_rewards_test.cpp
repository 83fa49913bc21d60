#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mixed_reward/bmas_reward.hpp"
#include "mixed_reward/error.hpp"
#include "mixed_reward/scalar_rewards.hpp"
#include "test_support.hpp"

namespace mixed_reward {
namespace {

using testing::IntBox;
using testing::pixel_count_iou;
using testing::tagged;

TEST(MatchingReward, Examples) {
  const auto yes = matching_reward("Yes, it is.", YesNoTruth{true});
  EXPECT_EQ(yes.value, 1.0);
  EXPECT_TRUE(yes.parse_ok);
  const auto wrong = matching_reward("(B)", ChoiceTruth{'C'});
  EXPECT_EQ(wrong.value, 0.0);
  EXPECT_TRUE(wrong.parse_ok);
  const auto unclear = matching_reward("unclear", YesNoTruth{false});
  EXPECT_EQ(unclear.value, 0.0);
  EXPECT_FALSE(unclear.parse_ok);
  EXPECT_EQ(unclear.kind, DataType::Yorn);
}

TEST(ChartReward, Examples) {
  const ScoreConfig config;
  EXPECT_EQ(chart_reward("42", 42.0, config).value, 1.0);
  EXPECT_EQ(chart_reward("42.005", 42.0, config).value, 1.0);
  EXPECT_EQ(chart_reward("43", 42.0, config).value, 0.0);
  const auto none = chart_reward("n/a", 42.0, config);
  EXPECT_EQ(none.value, 0.0);
  EXPECT_FALSE(none.parse_ok);
}

TEST(ChartReward, StrictInequalityAtTolerance) {
  ScoreConfig config;
  config.chart_tolerance = 0.5;  // exactly representable
  EXPECT_EQ(chart_reward("1.5", 1.0, config).value, 0.0);
  EXPECT_EQ(chart_reward("1.25", 1.0, config).value, 1.0);
  EXPECT_EQ(chart_reward("42.011", 42.0, ScoreConfig{}).value, 0.0);
}

TEST(ChartReward, RelativeModeScalesWithMagnitude) {
  ScoreConfig config;
  config.chart_tolerance_mode = ChartToleranceMode::Relative;
  EXPECT_EQ(chart_reward("1005", 1000.0, config).value, 1.0);   // 5 < 0.01 * 1000
  EXPECT_EQ(chart_reward("1011", 1000.0, config).value, 0.0);
  EXPECT_EQ(chart_reward("0.005", 0.0, config).value, 1.0);     // floor of max(1, |gt|)
  config.chart_tolerance_mode = ChartToleranceMode::Absolute;
  EXPECT_EQ(chart_reward("1005", 1000.0, config).value, 0.0);
}

TEST(ChartReward, MonotoneInToleranceProperty) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> value(-100.0, 100.0);
  std::uniform_real_distribution<double> tol(1e-4, 5.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double truth = value(rng);
    const double pred = truth + std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
    ScoreConfig tight, loose;
    tight.chart_tolerance = tol(rng);
    loose.chart_tolerance = tight.chart_tolerance + tol(rng);
    const std::string answer = std::to_string(pred);
    const double r_tight = chart_reward(answer, truth, tight).value;
    const double r_loose = chart_reward(answer, truth, loose).value;
    ASSERT_TRUE(r_tight == 0.0 || r_tight == 1.0);
    if (r_tight == 1.0) ASSERT_EQ(r_loose, 1.0);
  }
}

TEST(Iou, Examples) {
  EXPECT_EQ(iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  EXPECT_EQ(iou({0, 0, 10, 10}, {20, 20, 30, 30}), 0.0);
  EXPECT_NEAR(iou({0, 0, 10, 10}, {5, 0, 15, 10}), 50.0 / 150.0, 1e-15);
  EXPECT_NEAR(iou({0, 0, 10, 10}, {5, 0, 15, 10}), pixel_count_iou({0, 0, 10, 10}, {5, 0, 15, 10}), 1e-12);
}

TEST(Iou, DegenerateBoxes) {
  EXPECT_EQ(iou({0, 0, 0, 0}, {0, 0, 0, 0}), 0.0);
  EXPECT_EQ(iou({5, 5, 5, 9}, {0, 0, 10, 10}), 0.0);
  EXPECT_EQ(iou({0, 0, 10, 10}, {10, 0, 20, 10}), 0.0);
}

TEST(Iou, AgreesWithPixelOracleProperty) {
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> coord(0, 100);
  for (int trial = 0; trial < 2000; ++trial) {
    const IntBox a{coord(rng), coord(rng), coord(rng), coord(rng)};
    const IntBox b{coord(rng), coord(rng), coord(rng), coord(rng)};
    const BoundingBox ba = BoundingBox{double(a.x1), double(a.y1), double(a.x2), double(a.y2)}.canonical();
    const BoundingBox bb = BoundingBox{double(b.x1), double(b.y1), double(b.x2), double(b.y2)}.canonical();
    const double v = iou(ba, bb);
    ASSERT_NEAR(v, pixel_count_iou(a, b), 1e-9);
    ASSERT_EQ(v, iou(bb, ba));
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 1.0);
    if (ba.area() > 0) ASSERT_EQ(iou(ba, ba), 1.0);
  }
}

TEST(IouReward, Examples) {
  EXPECT_EQ(iou_reward("[0,0,10,10]", {0, 0, 10, 10}).value, 1.0);
  const auto none = iou_reward("no box", {0, 0, 10, 10});
  EXPECT_EQ(none.value, 0.0);
  EXPECT_FALSE(none.parse_ok);
  EXPECT_NEAR(iou_reward("[5,0,15,10]", {0, 0, 10, 10}).value, 1.0 / 3.0, 1e-15);
}

TEST(Combine, Examples) {
  const ScoreConfig config;
  EXPECT_EQ(combine({1.0, DataType::Mcq, true}, 1, config), 1.5);
  EXPECT_EQ(combine({0.0, DataType::Mcq, true}, 0, config), 0.0);
  EXPECT_EQ(combine({0.25, DataType::Iou, true}, 1, config), 0.75);
}

TEST(Combine, LinearInFormatProperty) {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    ScoreConfig config;
    config.lambda = 3.0 * u(rng);
    const TaskReward task{u(rng), DataType::Iou, true};
    EXPECT_NEAR(combine(task, 1, config) - combine(task, 0, config), config.lambda, 1e-12);
    config.lambda = 0.0;
    EXPECT_EQ(combine(task, 1, config), combine(task, 0, config));
  }
}

Sample validated(DataType type, GroundTruth truth) {
  return Sample{"s", type, "q", std::move(truth), {"placeholder"}};
}

TEST(ScoreResponse, Examples) {
  const ScoreConfig config;
  const auto mcq = score_response(validated(DataType::Mcq, ChoiceTruth{'B'}), tagged("compare", "B"), config, nullptr);
  EXPECT_EQ(mcq.final_reward, 1.5);
  EXPECT_EQ(mcq.format_reward, 1);

  const auto chart = score_response(validated(DataType::Chart, ChartTruth{7.0}), "7", config, nullptr);
  EXPECT_EQ(chart.task_reward, 1.0);
  EXPECT_EQ(chart.format_reward, 0);
  EXPECT_EQ(chart.final_reward, 1.0);

  const auto box =
      score_response(validated(DataType::Iou, BoundingBox{0, 0, 10, 10}), tagged("look", "nothing"), config, nullptr);
  EXPECT_EQ(box.task_reward, 0.0);
  EXPECT_FALSE(box.parse_ok);
  EXPECT_EQ(box.final_reward, config.lambda * box.format_reward);
  EXPECT_TRUE(box.notes.has_value());
}

TEST(ScoreResponse, MalformedResponsesScoreWholeText) {
  const ScoreConfig config;
  const auto r = score_response(validated(DataType::Mcq, ChoiceTruth{'B'}), "<answer>B</answer>", config, nullptr);
  EXPECT_EQ(r.format_reward, 0);
  // parse_choice sees the whole response; the first standalone letter is B
  EXPECT_EQ(r.task_reward, 1.0);
}

TEST(ScoreResponse, OpenEndedNeedsEmbedder) {
  const ScoreConfig config;
  try {
    score_response(validated(DataType::OpenEnded, ReferenceTruth{"a b"}), "a b", config, nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmbedderUnavailable);
  }
}

// Mutating the think text with the tags intact never changes the task reward.
TEST(ScoreResponse, ThinkSectionDoesNotAffectTaskRewardProperty) {
  auto table = std::make_shared<const EmbeddingTable>(
      EmbeddingTable::create({"a", "b", "c"}, 2, {1.f, 0.f, 0.f, 1.f, 1.f, 1.f}));
  const Embedder embedder(table);
  const std::vector<std::pair<Sample, std::string>> cases{
      {validated(DataType::Yorn, YesNoTruth{true}), "yes"},
      {validated(DataType::Mcq, ChoiceTruth{'C'}), "(C)"},
      {validated(DataType::Chart, ChartTruth{3.5}), "3.5"},
      {validated(DataType::Iou, BoundingBox{0, 0, 4, 4}), "[1,1,4,4]"},
      {validated(DataType::OpenEnded, ReferenceTruth{"b c"}), "a b"},
  };
  const std::vector<std::string> thoughts{"", "A B C yes no 42 [0,0,1,1]", "c c c", "no.", "\n\n", "zzz 1e9"};
  std::mt19937 rng(31);
  for (const auto& [sample, answer] : cases) {
    for (OpenRewardVariant variant : {OpenRewardVariant::Bmas, OpenRewardVariant::Bipartite,
                                      OpenRewardVariant::Meanpool}) {
      ScoreConfig config;
      config.open_reward_variant = variant;
      const auto base = score_response(sample, tagged("", answer), config, &embedder);
      for (int k = 0; k < 20; ++k) {
        const auto r = score_response(sample, tagged(thoughts[rng() % thoughts.size()], answer), config, &embedder);
        ASSERT_EQ(r.task_reward, base.task_reward);
        ASSERT_EQ(r.format_reward, 1);
        ASSERT_NEAR(r.final_reward, r.task_reward + config.lambda * r.format_reward, 1e-12);
      }
    }
  }
}

TEST(ScoreResponse, TaskRewardRangesProperty) {
  auto table = std::make_shared<const EmbeddingTable>(
      EmbeddingTable::create({"a", "b", "c", "d"}, 2, {1.f, 0.f, 0.f, 1.f, 1.f, 1.f, -1.f, 0.f}));
  const Embedder embedder(table);
  std::mt19937 rng(37);
  const std::vector<std::string> atoms{"a", "b", "c", "d", " ", "yes", "no", "B", "(A)", "4", "[0,0,2,2]",
                                       "<think>", "</think>", "<answer>", "</answer>", "1,5"};
  const std::vector<Sample> samples{validated(DataType::Yorn, YesNoTruth{false}),
                                    validated(DataType::Mcq, ChoiceTruth{'B'}),
                                    validated(DataType::Chart, ChartTruth{4.0}),
                                    validated(DataType::Iou, BoundingBox{0, 0, 3, 3}),
                                    validated(DataType::OpenEnded, ReferenceTruth{"a b d"})};
  const ScoreConfig config;
  for (int trial = 0; trial < 3000; ++trial) {
    std::string response;
    for (int k = 0; k < static_cast<int>(rng() % 8); ++k) response += atoms[rng() % atoms.size()];
    const auto& sample = samples[static_cast<std::size_t>(trial) % samples.size()];
    const auto r = score_response(sample, response, config, &embedder);
    ASSERT_EQ(r.task_kind, sample.data_type);
    ASSERT_NEAR(r.final_reward, r.task_reward + config.lambda * r.format_reward, 1e-12);
    switch (sample.data_type) {
      case DataType::Iou: ASSERT_TRUE(r.task_reward >= 0.0 && r.task_reward <= 1.0); break;
      case DataType::OpenEnded: ASSERT_TRUE(r.task_reward >= -1.0 && r.task_reward <= 1.0); break;
      default: ASSERT_TRUE(r.task_reward == 0.0 || r.task_reward == 1.0); break;
    }
    if (!r.parse_ok) ASSERT_EQ(r.task_reward, 0.0);
  }
}

}  // namespace
}  // namespace mixed_reward
