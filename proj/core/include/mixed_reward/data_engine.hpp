#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mixed_reward/bmas_reward.hpp"
#include "mixed_reward/core_model.hpp"
#include "mixed_reward/error.hpp"
#include "mixed_reward/grpo_math.hpp"

namespace mixed_reward {

/// A sample with one breakdown per response and the group's advantages.
struct ScoredGroup {
  Sample sample;
  std::vector<RewardBreakdown> breakdowns;
  GroupAdvantages advantages;
};

/// A sample (or input line) that could not be scored.
struct Issue {
  std::size_t line_no = 0;
  std::string id;
  ErrorCode code = ErrorCode::SchemaViolation;
  std::string message;
};

using GroupOutcome = std::variant<ScoredGroup, Issue>;

/// total = kept + dropped_uniform + dropped_invalid
struct FilterReport {
  std::size_t total = 0;
  std::size_t kept = 0;
  std::size_t dropped_uniform = 0;
  std::size_t dropped_invalid = 0;
  std::map<DataType, std::size_t> per_type_kept;

  friend bool operator==(const FilterReport&, const FilterReport&) = default;
};

struct DatasetStats {
  std::size_t total = 0;
  std::map<DataType, std::size_t> counts;
  /// Empty when total == 0.
  std::map<DataType, double> proportions;

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

inline constexpr double kUniformRewardTolerance = 1e-9;

/// Scores every response of a validated sample and normalizes the final
/// rewards into advantages (zero-variance groups get all-zero advantages).
/// Throws GroupTooSmall for a single response.
ScoredGroup score_group(const Sample& sample, const ScoreConfig& config, const Embedder* embedder);

/// True when max(final_reward) - min(final_reward) < 1e-9.
bool is_uniform(const ScoredGroup& group) noexcept;

/// Incremental form of filter_groups, used by the streaming pipeline.
class FilterAccumulator {
 public:
  /// Returns true when the group is kept.
  bool add(const ScoredGroup& group);
  void add_invalid();
  const FilterReport& report() const noexcept { return report_; }

 private:
  FilterReport report_;
};

struct FilterResult {
  std::vector<Sample> kept;
  FilterReport report;
};

/// Drops zero-variance groups (and counts failed groups as invalid); kept
/// samples keep input order.
FilterResult filter_groups(std::span<const GroupOutcome> groups);

DatasetStats dataset_stats(std::span<const Sample> samples);

/// Incremental form of dataset_stats.
class StatsAccumulator {
 public:
  void add(DataType type) { ++counts_[type]; ++total_; }
  DatasetStats finish() const;

 private:
  std::size_t total_ = 0;
  std::map<DataType, std::size_t> counts_;
};

struct PipelineOptions {
  ScoreConfig config;
  const Embedder* embedder = nullptr;
  /// Worker threads scoring groups concurrently; output order never depends on it.
  unsigned workers = 1;
  std::size_t batch_size = 512;
};

/// Callbacks receiving pipeline output in input order.
struct PipelineSinks {
  std::function<void(const ScoredGroup&, bool kept)> on_scored;
  std::function<void(const Sample&)> on_kept;
  std::function<void(const Issue&)> on_issue;
};

struct PipelineSummary {
  FilterReport report;
  /// Distribution of the kept samples.
  DatasetStats stats;
};

/// read -> validate -> score_group -> filter -> stats over a samples.jsonl
/// stream. Bad lines, invalid samples, duplicate ids and unscorable groups
/// are reported through on_issue and counted as dropped_invalid.
/// Throws only when no embedder is available for an open-ended sample.
PipelineSummary run_pipeline(std::istream& input, const PipelineOptions& options, const PipelineSinks& sinks);

/// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

nlohmann::json report_to_json(const FilterReport& report);
nlohmann::json stats_to_json(const DatasetStats& stats);
/// One scored.jsonl object.
nlohmann::json scored_to_json(const ScoredGroup& group, bool kept);

}  // namespace mixed_reward
