#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <utility>

#include "mixed_reward/bmas_reward.hpp"
#include "mixed_reward/error.hpp"
#include "mixed_reward/text_util.hpp"

namespace mixed_reward {
namespace {

constexpr std::array<char, 4> kMagic{'M', 'R', 'E', '1'};
constexpr std::size_t kHeaderBytes = 12;

std::uint32_t read_u32_le(const unsigned char* p) noexcept {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> bytes{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                  static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes.data(), bytes.size());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return data;
}

// Decodes one UTF-8 code point starting at `i`; malformed bytes decode as
// themselves so they stay inside the surrounding word.
char32_t decode_utf8(std::string_view s, std::size_t i, std::size_t& len) noexcept {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) {
    return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  auto bits = [&](std::size_t k) { return static_cast<char32_t>(static_cast<unsigned char>(s[i + k]) & 0x3F); };
  if (b0 < 0x80) {
    len = 1;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    len = 2;
    return (static_cast<char32_t>(b0 & 0x1F) << 6) | bits(1);
  }
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    len = 3;
    return (static_cast<char32_t>(b0 & 0x0F) << 12) | (bits(1) << 6) | bits(2);
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    len = 4;
    return (static_cast<char32_t>(b0 & 0x07) << 18) | (bits(1) << 12) | (bits(2) << 6) | bits(3);
  }
  len = 1;
  return 0xFFFD;
}

bool is_unicode_space(char32_t c) noexcept {
  return c == U' ' || (c >= U'\t' && c <= U'\r') || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

bool is_unicode_punct(char32_t c) noexcept {
  if (c < 0x80) {
    return (c >= U'!' && c <= U'/') || (c >= U':' && c <= U'@') || (c >= U'[' && c <= U'`') ||
           (c >= U'{' && c <= U'~');
  }
  return (c >= 0xA1 && c <= 0xBF && c != 0xAA && c != 0xB2 && c != 0xB3 && c != 0xB5 && c != 0xB9 && c != 0xBA &&
          c != 0xBC && c != 0xBD && c != 0xBE) ||
         c == 0xD7 || c == 0xF7 || (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
         (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011) || (c >= 0x3014 && c <= 0x301F) ||
         (c >= 0xFF01 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20) || (c >= 0xFF3B && c <= 0xFF40) ||
         (c >= 0xFF5B && c <= 0xFF65);
}

}  // namespace

EmbeddingTable EmbeddingTable::create(std::vector<std::string> vocab, std::size_t dim, std::vector<float> vectors) {
  if (dim == 0) throw Error(ErrorCode::HeaderMismatch, "embedding dimension must be positive");
  if (vectors.size() != vocab.size() * dim) {
    throw Error(ErrorCode::VocabSizeMismatch, "vocab has " + std::to_string(vocab.size()) + " tokens but " +
                                                  std::to_string(vectors.size() / dim) + " embedding rows");
  }

  EmbeddingTable table;
  table.dim_ = dim;
  table.index_.reserve(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (!table.index_.emplace(vocab[i], static_cast<TokenId>(i)).second) {
      throw Error(ErrorCode::DuplicateToken, "duplicate vocab token '" + vocab[i] + "' at line " +
                                                 std::to_string(i + 1));
    }
  }

  table.unit_.resize(vectors.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const float* row = vectors.data() + i * dim;
    double norm2 = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      if (!std::isfinite(row[k])) {
        throw Error(ErrorCode::NonFiniteValue, "non-finite embedding value in row " + std::to_string(i));
      }
      norm2 += static_cast<double>(row[k]) * static_cast<double>(row[k]);
    }
    if (!(norm2 > 0.0)) throw Error(ErrorCode::ZeroNormRow, "embedding row " + std::to_string(i) + " has zero norm");
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t k = 0; k < dim; ++k) table.unit_[i * dim + k] = static_cast<double>(row[k]) * inv;
  }
  table.vocab_ = std::move(vocab);
  table.vectors_ = std::move(vectors);
  return table;
}

std::optional<TokenId> EmbeddingTable::lookup(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingTable load_embedding_table(const std::filesystem::path& table_path, const std::filesystem::path& vocab_path) {
  const std::string data = read_file(table_path);
  if (data.size() < kMagic.size() || std::memcmp(data.data(), kMagic.data(), kMagic.size()) != 0) {
    throw Error(ErrorCode::BadMagic, table_path.string() + ": not an MRE1 embedding table");
  }
  if (data.size() < kHeaderBytes) throw Error(ErrorCode::HeaderMismatch, table_path.string() + ": truncated header");
  const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
  const std::uint64_t vocab_size = read_u32_le(bytes + 4);
  const std::uint64_t dim = read_u32_le(bytes + 8);
  if (dim == 0) throw Error(ErrorCode::HeaderMismatch, table_path.string() + ": dimension is zero");
  const std::uint64_t expected = kHeaderBytes + vocab_size * dim * sizeof(float);
  if (data.size() != expected) {
    throw Error(ErrorCode::HeaderMismatch, table_path.string() + ": header declares " + std::to_string(vocab_size) +
                                               "x" + std::to_string(dim) + " but payload has " +
                                               std::to_string(data.size() - kHeaderBytes) + " bytes");
  }

  std::vector<float> vectors(vocab_size * dim);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const std::uint32_t bits = read_u32_le(bytes + kHeaderBytes + i * 4);
    vectors[i] = std::bit_cast<float>(bits);
  }

  const std::string vocab_text = read_file(vocab_path);
  std::vector<std::string> vocab;
  std::size_t start = 0;
  while (start < vocab_text.size()) {
    auto end = vocab_text.find('\n', start);
    if (end == std::string::npos) end = vocab_text.size();
    std::string token = vocab_text.substr(start, end - start);
    if (!token.empty() && token.back() == '\r') token.pop_back();
    vocab.push_back(std::move(token));
    start = end + 1;
  }
  if (vocab.size() != vocab_size) {
    throw Error(ErrorCode::VocabSizeMismatch, vocab_path.string() + ": " + std::to_string(vocab.size()) +
                                                  " tokens but table header declares " +
                                                  std::to_string(vocab_size));
  }
  return EmbeddingTable::create(std::move(vocab), dim, std::move(vectors));
}

void save_embedding_table(const EmbeddingTable& table, const std::filesystem::path& table_path,
                          const std::filesystem::path& vocab_path) {
  std::ofstream out(table_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + table_path.string());
  out.write(kMagic.data(), kMagic.size());
  write_u32_le(out, static_cast<std::uint32_t>(table.vocab_size()));
  write_u32_le(out, static_cast<std::uint32_t>(table.dim()));
  for (float v : table.raw()) write_u32_le(out, std::bit_cast<std::uint32_t>(v));
  if (!out) throw Error(ErrorCode::Io, "cannot write " + table_path.string());

  std::ofstream vocab_out(vocab_path, std::ios::binary);
  if (!vocab_out) throw Error(ErrorCode::Io, "cannot write " + vocab_path.string());
  for (const auto& token : table.vocab()) vocab_out << token << '\n';
  if (!vocab_out) throw Error(ErrorCode::Io, "cannot write " + vocab_path.string());
}

TokenSequence default_tokenize(std::string_view text, const EmbeddingTable& table) {
  TokenSequence ids;
  std::string piece;
  auto flush = [&] {
    if (piece.empty()) return;
    if (auto id = table.lookup(piece)) ids.push_back(*id);
    piece.clear();
  };
  for (std::size_t i = 0; i < text.size();) {
    std::size_t len = 1;
    const char32_t cp = decode_utf8(text, i, len);
    if (is_unicode_space(cp)) {
      flush();
    } else if (is_unicode_punct(cp)) {
      flush();
      piece.assign(text.substr(i, len));
      flush();
    } else if (len == 1) {
      piece.push_back(ascii_lower(text[i]));
    } else {
      piece.append(text.substr(i, len));
    }
    i += len;
  }
  flush();
  return ids;
}

Embedder::Embedder(std::shared_ptr<const EmbeddingTable> table) : table_(std::move(table)) {
  if (!table_) throw Error(ErrorCode::EmbedderUnavailable, "embedder requires a table");
  const EmbeddingTable* raw = table_.get();
  tokenizer_ = [raw](std::string_view text) { return default_tokenize(text, *raw); };
}

Embedder::Embedder(std::shared_ptr<const EmbeddingTable> table, Tokenizer tokenizer)
    : table_(std::move(table)), tokenizer_(std::move(tokenizer)) {
  if (!table_) throw Error(ErrorCode::EmbedderUnavailable, "embedder requires a table");
  if (!tokenizer_) throw Error(ErrorCode::EmbedderUnavailable, "embedder requires a tokenizer");
}

TokenSequence Embedder::tokenize(std::string_view text) const {
  TokenSequence ids = tokenizer_(text);
  for (TokenId id : ids) {
    if (id >= table_->vocab_size()) {
      throw Error(ErrorCode::InvalidTokenId, "tokenizer produced id " + std::to_string(id) + " outside vocab of " +
                                                 std::to_string(table_->vocab_size()));
    }
  }
  return ids;
}

}  // namespace mixed_reward
