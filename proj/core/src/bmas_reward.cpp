#include "mixed_reward/bmas_reward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mixed_reward/error.hpp"

namespace mixed_reward {
namespace {

// Sums in ascending order so the result depends only on the multiset.
double sorted_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

void require_nonempty(std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) throw Error(ErrorCode::EmptySequence, "similarity requires nonempty token sequences");
}

// Min-cost assignment of every row to a distinct column (rows <= cols),
// O(rows^2 * cols). Returns the column of each row.
std::vector<std::size_t> hungarian_min_cost(const std::vector<double>& cost, std::size_t rows, std::size_t cols) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> owner(cols + 1, 0), way(cols + 1, 0);
  auto at = [&](std::size_t i, std::size_t j) { return cost[(i - 1) * cols + (j - 1)]; };

  for (std::size_t i = 1; i <= rows; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(cols + 1, inf);
    std::vector<bool> used(cols + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = at(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> column_of(rows, 0);
  for (std::size_t j = 1; j <= cols; ++j) {
    if (owner[j] != 0) column_of[owner[j] - 1] = j - 1;
  }
  return column_of;
}

}  // namespace

SimilarityMatrix::SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorCode::HeaderMismatch, "similarity matrix shape does not match its value count");
  }
}

SimilarityMatrix SimilarityMatrix::transposed() const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out[j * rows_ + i] = values_[i * cols_ + j];
  }
  return {cols_, rows_, std::move(out)};
}

SimilarityMatrix similarity_matrix(std::span<const TokenId> response, std::span<const TokenId> reference,
                                   const EmbeddingTable& table) {
  require_nonempty(response.size(), reference.size());
  for (auto ids : {response, reference}) {
    for (TokenId id : ids) {
      if (id >= table.vocab_size()) throw Error(ErrorCode::InvalidTokenId, "token id " + std::to_string(id) + " out of range");
    }
  }
  const std::size_t dim = table.dim();
  std::vector<double> values(response.size() * reference.size());
  for (std::size_t i = 0; i < response.size(); ++i) {
    const auto a = table.unit_row(response[i]);
    for (std::size_t j = 0; j < reference.size(); ++j) {
      const auto b = table.unit_row(reference[j]);
      double dot = 0.0;
      for (std::size_t k = 0; k < dim; ++k) dot += a[k] * b[k];
      values[i * reference.size() + j] = std::clamp(dot, -1.0, 1.0);
    }
  }
  return {response.size(), reference.size(), std::move(values)};
}

double bmas_score(const SimilarityMatrix& sim) {
  const std::size_t n = sim.rows();
  const std::size_t m = sim.cols();
  require_nonempty(n, m);
  const double lowest = std::numeric_limits<double>::lowest();
  std::vector<double> row_max(n, lowest), col_max(m, lowest);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double s = sim(i, j);
      row_max[i] = std::max(row_max[i], s);
      col_max[j] = std::max(col_max[j], s);
    }
  }
  const double forward = sorted_sum(std::move(row_max)) / static_cast<double>(n);
  const double backward = sorted_sum(std::move(col_max)) / static_cast<double>(m);
  return 0.5 * (forward + backward);
}

std::vector<std::ptrdiff_t> optimal_assignment(const SimilarityMatrix& sim) {
  const std::size_t n = sim.rows();
  const std::size_t m = sim.cols();
  require_nonempty(n, m);
  std::vector<std::ptrdiff_t> assignment(n, -1);
  if (n <= m) {
    std::vector<double> cost(sim.values().size());
    std::transform(sim.values().begin(), sim.values().end(), cost.begin(), [](double s) { return -s; });
    const auto cols = hungarian_min_cost(cost, n, m);
    for (std::size_t i = 0; i < n; ++i) assignment[i] = static_cast<std::ptrdiff_t>(cols[i]);
  } else {
    const auto t = sim.transposed();
    std::vector<double> cost(t.values().size());
    std::transform(t.values().begin(), t.values().end(), cost.begin(), [](double s) { return -s; });
    const auto rows = hungarian_min_cost(cost, m, n);
    for (std::size_t j = 0; j < m; ++j) assignment[rows[j]] = static_cast<std::ptrdiff_t>(j);
  }
  return assignment;
}

double bipartite_score(const SimilarityMatrix& sim) {
  const auto assignment = optimal_assignment(sim);
  std::vector<double> matched;
  matched.reserve(std::min(sim.rows(), sim.cols()));
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] >= 0) matched.push_back(sim(i, static_cast<std::size_t>(assignment[i])));
  }
  const auto k = static_cast<double>(matched.size());
  return sorted_sum(std::move(matched)) / k;
}

double meanpool_cosine(std::span<const TokenId> response, std::span<const TokenId> reference,
                       const EmbeddingTable& table) {
  require_nonempty(response.size(), reference.size());
  const std::size_t dim = table.dim();
  auto mean_of = [&](std::span<const TokenId> ids) {
    std::vector<double> mean(dim, 0.0);
    for (TokenId id : ids) {
      if (id >= table.vocab_size()) throw Error(ErrorCode::InvalidTokenId, "token id " + std::to_string(id) + " out of range");
      const auto row = table.row(id);
      for (std::size_t k = 0; k < dim; ++k) mean[k] += static_cast<double>(row[k]);
    }
    for (double& x : mean) x /= static_cast<double>(ids.size());
    return mean;
  };
  const auto a = mean_of(response);
  const auto b = mean_of(reference);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (!(na > 0.0) || !(nb > 0.0)) throw Error(ErrorCode::ZeroMeanVector, "mean embedding has zero norm");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double bmas_reward(std::string_view response_answer, std::string_view reference, const Embedder& embedder) {
  const auto response_ids = embedder.tokenize(response_answer);
  const auto reference_ids = embedder.tokenize(reference);
  if (response_ids.empty() || reference_ids.empty()) return 0.0;
  return bmas_score(similarity_matrix(response_ids, reference_ids, embedder.table()));
}

}  // namespace mixed_reward
