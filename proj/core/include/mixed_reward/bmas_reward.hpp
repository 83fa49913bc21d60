#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mixed_reward {

using TokenId = std::uint32_t;
using TokenSequence = std::vector<TokenId>;

/// Immutable token -> vector store, typically the policy model's input
/// embedding matrix exported once to disk.
///
/// Rows are kept twice: as loaded (float) for mean pooling and unit-normalized
/// (double) for cosine similarity.
class EmbeddingTable {
 public:
  /// Throws VocabSizeMismatch, HeaderMismatch, DuplicateToken, NonFiniteValue
  /// or ZeroNormRow.
  static EmbeddingTable create(std::vector<std::string> vocab, std::size_t dim, std::vector<float> vectors);

  std::size_t vocab_size() const noexcept { return vocab_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::string>& vocab() const noexcept { return vocab_; }

  std::span<const float> row(TokenId id) const noexcept { return {vectors_.data() + id * dim_, dim_}; }
  std::span<const double> unit_row(TokenId id) const noexcept { return {unit_.data() + id * dim_, dim_}; }
  std::span<const float> raw() const noexcept { return vectors_; }

  /// Id of an exact vocab string.
  std::optional<TokenId> lookup(std::string_view token) const;

 private:
  EmbeddingTable() = default;

  std::size_t dim_ = 0;
  std::vector<std::string> vocab_;
  std::vector<float> vectors_;
  std::vector<double> unit_;
  std::unordered_map<std::string, TokenId> index_;
};

/// Reads the binary table ("MRE1", u32 vocab_size, u32 dim, float32
/// row-major, little-endian) and its one-token-per-line vocab file.
EmbeddingTable load_embedding_table(const std::filesystem::path& table_path, const std::filesystem::path& vocab_path);

/// Writes `table` in the format read by load_embedding_table.
void save_embedding_table(const EmbeddingTable& table, const std::filesystem::path& table_path,
                          const std::filesystem::path& vocab_path);

/// Lowercases, splits on whitespace and punctuation (punctuation marks are
/// pieces of their own) and maps pieces to vocab ids. Unknown pieces are
/// dropped.
TokenSequence default_tokenize(std::string_view text, const EmbeddingTable& table);

/// Tokenizer + embedding table pair backing the open-ended reward.
class Embedder {
 public:
  using Tokenizer = std::function<TokenSequence(std::string_view)>;

  explicit Embedder(std::shared_ptr<const EmbeddingTable> table);
  Embedder(std::shared_ptr<const EmbeddingTable> table, Tokenizer tokenizer);

  /// Throws InvalidTokenId if the tokenizer emits an id outside the table.
  TokenSequence tokenize(std::string_view text) const;
  const EmbeddingTable& table() const noexcept { return *table_; }

 private:
  std::shared_ptr<const EmbeddingTable> table_;
  Tokenizer tokenizer_;
};

/// Dense row-major N x M matrix of cosine similarities.
class SimilarityMatrix {
 public:
  SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }
  const std::vector<double>& values() const noexcept { return values_; }

  SimilarityMatrix transposed() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

/// values(i, j) = cos(embedding(response[i]), embedding(reference[j])).
/// Throws EmptySequence when either sequence is empty.
SimilarityMatrix similarity_matrix(std::span<const TokenId> response, std::span<const TokenId> reference,
                                   const EmbeddingTable& table);

/// Bidirectional max-average similarity:
///   1/2 * (mean_i max_j sim(i, j) + mean_j max_i sim(i, j)).
/// Each mean sums its maxima in sorted order, so the score is exactly
/// invariant under row/column permutation and transposition.
double bmas_score(const SimilarityMatrix& sim);

/// Maximum-weight one-to-one assignment of min(N, M) pairs (Hungarian
/// method), returned as the mean matched similarity.
double bipartite_score(const SimilarityMatrix& sim);

/// Optimal assignment behind bipartite_score: assignment[i] is the column
/// matched to row i, or -1 when row i is unmatched (N > M).
std::vector<std::ptrdiff_t> optimal_assignment(const SimilarityMatrix& sim);

/// Cosine between the mean response embedding and the mean reference
/// embedding. Throws EmptySequence or ZeroMeanVector.
double meanpool_cosine(std::span<const TokenId> response, std::span<const TokenId> reference,
                       const EmbeddingTable& table);

/// Tokenizes both texts and returns their BMAS score, or 0 when either
/// tokenization is empty.
double bmas_reward(std::string_view response_answer, std::string_view reference, const Embedder& embedder);

}  // namespace mixed_reward
