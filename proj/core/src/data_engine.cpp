#include "mixed_reward/data_engine.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <unordered_set>

#include "mixed_reward/sample_io.hpp"
#include "mixed_reward/scalar_rewards.hpp"

namespace mixed_reward {

ScoredGroup score_group(const Sample& sample, const ScoreConfig& config, const Embedder* embedder) {
  if (sample.responses.size() < 2) {
    throw Error(ErrorCode::GroupTooSmall,
                "sample '" + sample.id + "' has " + std::to_string(sample.responses.size()) +
                    " response(s); advantages need at least 2");
  }
  ScoredGroup group{sample, {}, {}};
  group.breakdowns.reserve(sample.responses.size());
  std::vector<double> finals;
  finals.reserve(sample.responses.size());
  for (const auto& response : sample.responses) {
    group.breakdowns.push_back(score_response(sample, response, config, embedder));
    finals.push_back(group.breakdowns.back().final_reward);
  }
  group.advantages = group_advantages(finals, ZeroStdPolicy::Zeros);
  return group;
}

bool is_uniform(const ScoredGroup& group) noexcept {
  if (group.breakdowns.empty()) return true;
  const auto [lo, hi] = std::minmax_element(group.breakdowns.begin(), group.breakdowns.end(),
                                            [](const auto& a, const auto& b) { return a.final_reward < b.final_reward; });
  return hi->final_reward - lo->final_reward < kUniformRewardTolerance;
}

bool FilterAccumulator::add(const ScoredGroup& group) {
  ++report_.total;
  if (is_uniform(group)) {
    ++report_.dropped_uniform;
    return false;
  }
  ++report_.kept;
  ++report_.per_type_kept[group.sample.data_type];
  return true;
}

void FilterAccumulator::add_invalid() {
  ++report_.total;
  ++report_.dropped_invalid;
}

FilterResult filter_groups(std::span<const GroupOutcome> groups) {
  FilterResult result;
  FilterAccumulator acc;
  for (const auto& outcome : groups) {
    if (const auto* group = std::get_if<ScoredGroup>(&outcome)) {
      if (acc.add(*group)) result.kept.push_back(group->sample);
    } else {
      acc.add_invalid();
    }
  }
  result.report = acc.report();
  return result;
}

DatasetStats StatsAccumulator::finish() const {
  DatasetStats stats;
  stats.total = total_;
  for (DataType type : kAllDataTypes) {
    const auto it = counts_.find(type);
    stats.counts[type] = it == counts_.end() ? 0 : it->second;
  }
  if (total_ > 0) {
    for (const auto& [type, count] : stats.counts) {
      stats.proportions[type] = static_cast<double>(count) / static_cast<double>(total_);
    }
  }
  return stats;
}

DatasetStats dataset_stats(std::span<const Sample> samples) {
  StatsAccumulator acc;
  for (const auto& sample : samples) acc.add(sample.data_type);
  return acc.finish();
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min<std::size_t>(std::max(1u, workers), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

struct PendingItem {
  std::size_t line_no = 0;
  std::optional<Sample> sample;
  std::optional<GroupOutcome> outcome;
  std::exception_ptr fatal;
};

Issue make_issue(std::size_t line_no, std::string id, const Error& e) {
  return Issue{line_no, std::move(id), e.code(), e.what()};
}

}  // namespace

PipelineSummary run_pipeline(std::istream& input, const PipelineOptions& options, const PipelineSinks& sinks) {
  SampleReader reader(input);
  FilterAccumulator filter;
  StatsAccumulator stats;
  std::unordered_set<std::string> seen_ids;
  const std::size_t batch_size = std::max<std::size_t>(1, options.batch_size);

  bool done = false;
  while (!done) {
    std::vector<PendingItem> batch;
    batch.reserve(batch_size);
    while (batch.size() < batch_size) {
      auto record = reader.next();
      if (!record) {
        done = true;
        break;
      }
      PendingItem item;
      item.line_no = record->line_no;
      if (!record->ok()) {
        item.outcome = make_issue(record->line_no, "", record->error());
      } else {
        try {
          Sample sample = validate_sample(record->sample());
          if (!seen_ids.insert(sample.id).second) {
            throw Error(ErrorCode::DuplicateId, "duplicate sample id '" + sample.id + "'");
          }
          item.sample = std::move(sample);
        } catch (const Error& e) {
          item.outcome = make_issue(record->line_no, record->sample().id, e);
        }
      }
      batch.push_back(std::move(item));
    }

    parallel_for(batch.size(), options.workers, [&](std::size_t i) {
      auto& item = batch[i];
      if (item.outcome) return;
      try {
        item.outcome = score_group(*item.sample, options.config, options.embedder);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::EmbedderUnavailable) {
          item.fatal = std::current_exception();
        } else {
          item.outcome = make_issue(item.line_no, item.sample->id, e);
        }
      }
    });

    for (auto& item : batch) {
      if (item.fatal) std::rethrow_exception(item.fatal);
      if (const auto* group = std::get_if<ScoredGroup>(&*item.outcome)) {
        const bool kept = filter.add(*group);
        if (sinks.on_scored) sinks.on_scored(*group, kept);
        if (kept) {
          stats.add(group->sample.data_type);
          if (sinks.on_kept) sinks.on_kept(group->sample);
        }
      } else {
        filter.add_invalid();
        if (sinks.on_issue) sinks.on_issue(std::get<Issue>(*item.outcome));
      }
    }
  }
  return {filter.report(), stats.finish()};
}

nlohmann::json report_to_json(const FilterReport& report) {
  nlohmann::json per_type = nlohmann::json::object();
  for (DataType type : kAllDataTypes) {
    const auto it = report.per_type_kept.find(type);
    per_type[std::string(to_string(type))] = it == report.per_type_kept.end() ? 0 : it->second;
  }
  return {{"total", report.total},
          {"kept", report.kept},
          {"dropped_uniform", report.dropped_uniform},
          {"dropped_invalid", report.dropped_invalid},
          {"per_type_kept", per_type}};
}

nlohmann::json stats_to_json(const DatasetStats& stats) {
  nlohmann::json counts = nlohmann::json::object();
  nlohmann::json proportions = nlohmann::json::object();
  for (const auto& [type, count] : stats.counts) counts[std::string(to_string(type))] = count;
  for (const auto& [type, p] : stats.proportions) proportions[std::string(to_string(type))] = p;
  return {{"total", stats.total}, {"counts", counts}, {"proportions", proportions}};
}

nlohmann::json scored_to_json(const ScoredGroup& group, bool kept) {
  nlohmann::json finals = nlohmann::json::array();
  nlohmann::json tasks = nlohmann::json::array();
  nlohmann::json formats = nlohmann::json::array();
  for (const auto& b : group.breakdowns) {
    finals.push_back(b.final_reward);
    tasks.push_back(b.task_reward);
    formats.push_back(b.format_reward);
  }
  nlohmann::json out = nlohmann::json::object();
  out["id"] = group.sample.id;
  out["data_type"] = std::string(to_string(group.sample.data_type));
  out["final_rewards"] = std::move(finals);
  out["task_rewards"] = std::move(tasks);
  out["format_rewards"] = std::move(formats);
  out["advantages"] = group.advantages.values;
  out["degenerate"] = group.advantages.degenerate;
  out["kept"] = kept;
  return out;
}

}  // namespace mixed_reward
