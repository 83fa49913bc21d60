#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "mixed_reward/bmas_reward.hpp"
#include "mixed_reward/core_model.hpp"

namespace mixed_reward::cli {

struct HttpReply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// HTTP scoring service:
///   POST /v1/score      one samples.jsonl record -> {"breakdowns": [...]}
///   POST /v1/advantage  {"rewards": [...]}       -> {"advantages": [...], "degenerate": bool}
///   GET  /healthz       -> 200 "ok"
/// Schema violations answer 400, semantic violations 422, engine faults 500,
/// always with an {"error": ..., "code": ...} body.
class ScoringService {
 public:
  ScoringService(ScoreConfig config, std::shared_ptr<const Embedder> embedder);
  ~ScoringService();
  ScoringService(const ScoringService&) = delete;
  ScoringService& operator=(const ScoringService&) = delete;

  // Request handlers, usable without a socket.
  HttpReply handle_score(std::string_view body) const;
  HttpReply handle_advantage(std::string_view body) const;

  /// Binds `port` (0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); requires a successful bind().
  bool listen();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

 private:
  struct Server;
  ScoreConfig config_;
  std::shared_ptr<const Embedder> embedder_;
  std::unique_ptr<Server> server_;
};

}  // namespace mixed_reward::cli
