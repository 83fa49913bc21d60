#include "mixed_reward/grpo_math.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixed_reward/error.hpp"

namespace mixed_reward {
namespace {

constexpr double kMaxLogRatio = 700.0;

void check_exponent(double x, const char* what) {
  if (!std::isfinite(x) || std::abs(x) > kMaxLogRatio) {
    throw Error(ErrorCode::Overflow, std::string(what) + " log-ratio " + std::to_string(x) + " exceeds 700");
  }
}

double ratio_log(const ResponseLogProbs& lp, RatioLevel level) {
  const double delta = lp.logp_theta - lp.logp_old;
  if (level == RatioLevel::PerTokenMean) {
    if (lp.token_count < 1) throw Error(ErrorCode::NonFiniteValue, "token_count must be >= 1");
    return delta / static_cast<double>(lp.token_count);
  }
  return delta;
}

}  // namespace

GroupAdvantages group_advantages(std::span<const double> rewards, ZeroStdPolicy policy) {
  const std::size_t n = rewards.size();
  if (n < 2) throw Error(ErrorCode::GroupTooSmall, "advantage group needs at least 2 rewards, got " + std::to_string(n));
  for (double r : rewards) {
    if (!std::isfinite(r)) throw Error(ErrorCode::NonFiniteValue, "non-finite reward in group");
  }

  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(n);
  const double std = std::sqrt(var);

  GroupAdvantages out;
  if (std < kDegenerateStd) {
    if (policy == ZeroStdPolicy::Error) {
      throw Error(ErrorCode::DegenerateGroup, "all rewards in the group are equal");
    }
    out.values.assign(n, 0.0);
    out.degenerate = true;
    return out;
  }
  out.values.reserve(n);
  for (double r : rewards) out.values.push_back((r - mean) / std);
  return out;
}

GrpoHyper hyper_from_config(const ScoreConfig& config) {
  return {config.epsilon_clip, config.beta_kl, RatioLevel::Sequence};
}

double kl_penalty(const ResponseLogProbs& lp) {
  const double log_r = lp.logp_ref - lp.logp_theta;
  check_exponent(log_r, "reference");
  if (log_r == 0.0) return 0.0;
  // expm1 keeps precision near r = 1
  return std::max(0.0, std::expm1(log_r) - log_r);
}

double policy_ratio(const ResponseLogProbs& lp, RatioLevel level) {
  const double log_ratio = ratio_log(lp, level);
  check_exponent(log_ratio, "policy");
  return std::exp(log_ratio);
}

double clipped_surrogate(double ratio, double advantage, double epsilon) noexcept {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

double grpo_objective(std::span<const RolloutTerm> group, const GrpoHyper& hyper) {
  if (group.empty()) throw Error(ErrorCode::GroupTooSmall, "objective needs at least one rollout");
  double total = 0.0;
  for (const auto& term : group) {
    const double ratio = policy_ratio(term.logprobs, hyper.ratio_level);
    total += clipped_surrogate(ratio, term.advantage, hyper.epsilon);
    if (hyper.beta != 0.0) total -= hyper.beta * kl_penalty(term.logprobs);
  }
  return total / static_cast<double>(group.size());
}

std::vector<double> grpo_objective_gradient(std::span<const RolloutTerm> group, const GrpoHyper& hyper) {
  if (group.empty()) throw Error(ErrorCode::GroupTooSmall, "objective needs at least one rollout");
  const double inv_g = 1.0 / static_cast<double>(group.size());
  std::vector<double> grad;
  grad.reserve(group.size());
  for (const auto& term : group) {
    const auto& lp = term.logprobs;
    const double ratio = policy_ratio(lp, hyper.ratio_level);
    const double dlog_ratio =
        hyper.ratio_level == RatioLevel::PerTokenMean ? 1.0 / static_cast<double>(lp.token_count) : 1.0;
    const double a = term.advantage;
    const double clipped = std::clamp(ratio, 1.0 - hyper.epsilon, 1.0 + hyper.epsilon);
    // the clipped branch is constant in theta
    const double d_surrogate = (ratio * a <= clipped * a) ? a * ratio * dlog_ratio : 0.0;
    const double log_r = lp.logp_ref - lp.logp_theta;
    check_exponent(log_r, "reference");
    // d/dtheta (r - log r - 1) with r = exp(ref - theta) is 1 - r
    const double d_kl = -std::expm1(log_r);
    grad.push_back(inv_g * (d_surrogate - hyper.beta * d_kl));
  }
  return grad;
}

}  // namespace mixed_reward
