#pragma once

#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "mixed_reward/bmas_reward.hpp"
#include "mixed_reward/core_model.hpp"

namespace mixed_reward::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSoftErrors = 1;
inline constexpr int kExitFatal = 2;

struct CommandOptions {
  std::string input;   // empty: read stdin
  std::string out;     // empty: write stdout
  std::string report = "report.json";
  std::string table;   // falls back to $MIXED_REWARD_TABLE
  std::string vocab;
  ScoreConfig config;
  unsigned workers = 1;
  std::string host = "127.0.0.1";
  int port = 8080;
};

/// Loads the embedder named by options.table/options.vocab, or returns
/// nullptr when no table is configured. Throws mixed_reward::Error.
std::shared_ptr<const Embedder> load_embedder(const CommandOptions& options);

// Each command reads `in`, writes data to `out` and diagnostics to `err`,
// and returns kExitOk, kExitSoftErrors or kExitFatal.
int cmd_score(const CommandOptions& options, std::istream& in, std::ostream& out, std::ostream& err);
int cmd_filter(const CommandOptions& options, std::istream& in, std::ostream& out, std::ostream& err);
int cmd_stats(const CommandOptions& options, std::istream& in, std::ostream& out, std::ostream& err);
int cmd_advantage(const CommandOptions& options, std::istream& in, std::ostream& out, std::ostream& err);
int cmd_serve(const CommandOptions& options, std::ostream& err);

/// Parses argv and dispatches. --input/--out override `in`/`out`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace mixed_reward::cli
