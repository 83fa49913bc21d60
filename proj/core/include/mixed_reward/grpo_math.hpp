#pragma once

#include <span>
#include <vector>

#include "mixed_reward/core_model.hpp"

namespace mixed_reward {

/// Standardized rewards of one rollout group.
struct GroupAdvantages {
  std::vector<double> values;
  /// All rewards equal (population std below 1e-8); values are all zero.
  bool degenerate = false;

  friend bool operator==(const GroupAdvantages&, const GroupAdvantages&) = default;
};

inline constexpr double kDegenerateStd = 1e-8;

/// A_i = (r_i - mean) / std using the population standard deviation.
/// Throws GroupTooSmall for fewer than two rewards, NonFiniteValue for
/// non-finite rewards, and DegenerateGroup for zero-variance groups when
/// policy is ZeroStdPolicy::Error.
GroupAdvantages group_advantages(std::span<const double> rewards, ZeroStdPolicy policy = ZeroStdPolicy::Zeros);

/// Sequence log-probabilities of one response under the current, old and
/// reference policies.
struct ResponseLogProbs {
  double logp_theta = 0.0;
  double logp_old = 0.0;
  double logp_ref = 0.0;
  int token_count = 1;
};

enum class RatioLevel { Sequence, PerTokenMean };

struct GrpoHyper {
  double epsilon = 0.2;
  double beta = 0.04;
  RatioLevel ratio_level = RatioLevel::Sequence;
};

GrpoHyper hyper_from_config(const ScoreConfig& config);

/// KL(pi_theta || pi_ref) estimate r - log r - 1 with r = exp(logp_ref - logp_theta).
/// Nonnegative, zero iff the two log-probabilities agree. Throws Overflow when
/// |logp_ref - logp_theta| > 700.
double kl_penalty(const ResponseLogProbs& lp);

/// Importance ratio pi_theta / pi_old at the configured level.
double policy_ratio(const ResponseLogProbs& lp, RatioLevel level);

/// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A).
double clipped_surrogate(double ratio, double advantage, double epsilon) noexcept;

struct RolloutTerm {
  ResponseLogProbs logprobs;
  double advantage = 0.0;
};

/// Mean over the group of clipped_surrogate(...) - beta * kl_penalty(...).
double grpo_objective(std::span<const RolloutTerm> group, const GrpoHyper& hyper);

/// Partial derivatives of grpo_objective with respect to each logp_theta.
/// At the clip boundary the unclipped branch is taken.
std::vector<double> grpo_objective_gradient(std::span<const RolloutTerm> group, const GrpoHyper& hyper);

}  // namespace mixed_reward
