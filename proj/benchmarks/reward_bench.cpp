#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "mixed_reward/bmas_reward.hpp"
#include "mixed_reward/grpo_math.hpp"
#include "mixed_reward/scalar_rewards.hpp"

namespace {

using namespace mixed_reward;

SimilarityMatrix random_similarity(std::size_t n, std::size_t m, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> values(n * m);
  for (auto& v : values) v = u(rng);
  return SimilarityMatrix(n, m, std::move(values));
}

std::shared_ptr<const EmbeddingTable> random_table(std::size_t vocab, std::size_t dim) {
  std::mt19937 rng(1);
  std::normal_distribution<float> normal;
  std::vector<std::string> words(vocab);
  std::vector<float> values(vocab * dim);
  for (std::size_t i = 0; i < vocab; ++i) words[i] = "w" + std::to_string(i);
  for (auto& v : values) v = normal(rng);
  return std::make_shared<const EmbeddingTable>(EmbeddingTable::create(std::move(words), dim, std::move(values)));
}

std::string random_text(std::mt19937& rng, std::size_t vocab, std::size_t words) {
  std::string text;
  for (std::size_t k = 0; k < words; ++k) text += "w" + std::to_string(rng() % vocab) + " ";
  return text;
}

void BM_BmasScore(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto sim = random_similarity(n, n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(bmas_score(sim));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BmasScore)->RangeMultiplier(4)->Range(4, 256)->Complexity();

void BM_BipartiteScore(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto sim = random_similarity(n, n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(bipartite_score(sim));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BipartiteScore)->RangeMultiplier(4)->Range(4, 256)->Complexity();

void BM_SimilarityMatrix(benchmark::State& state) {
  const auto table = random_table(50000, 64);
  std::mt19937 rng(7);
  TokenSequence a(40), b(40);
  for (auto& id : a) id = static_cast<TokenId>(rng() % 50000);
  for (auto& id : b) id = static_cast<TokenId>(rng() % 50000);
  for (auto _ : state) benchmark::DoNotOptimize(similarity_matrix(a, b, *table));
}
BENCHMARK(BM_SimilarityMatrix);

void BM_Iou(benchmark::State& state) {
  const BoundingBox a{0, 0, 10, 10}, b{5, 2, 15, 12};
  for (auto _ : state) benchmark::DoNotOptimize(iou(a, b));
}
BENCHMARK(BM_Iou);

void BM_ScoreResponseOpenEnded(benchmark::State& state) {
  const Embedder embedder(random_table(50000, 64));
  std::mt19937 rng(9);
  const Sample sample{"o", DataType::OpenEnded, "q", ReferenceTruth{random_text(rng, 50000, 40)}, {"r"}};
  const std::string response = "<think>" + random_text(rng, 50000, 20) + "</think><answer>" +
                               random_text(rng, 50000, 40) + "</answer>";
  const ScoreConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(score_response(sample, response, config, &embedder));
}
BENCHMARK(BM_ScoreResponseOpenEnded);

void BM_ScoreResponseChart(benchmark::State& state) {
  const Sample sample{"c", DataType::Chart, "q", ChartTruth{1234.5}, {"r"}};
  const std::string response = "<think>add the bars</think><answer>The total is 1,234.5</answer>";
  const ScoreConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(score_response(sample, response, config, nullptr));
}
BENCHMARK(BM_ScoreResponseChart);

void BM_GroupAdvantages(benchmark::State& state) {
  std::vector<double> rewards{1.5, 0.5, 1.0, 0.0, 1.5, 0.5, 1.5, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(group_advantages(rewards));
}
BENCHMARK(BM_GroupAdvantages);

}  // namespace

BENCHMARK_MAIN();
