#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>

#include <nlohmann/json.hpp>

#include "mixed_reward/data_engine.hpp"
#include "mixed_reward/error.hpp"
#include "mixed_reward/grpo_math.hpp"
#include "mixed_reward/sample_io.hpp"
#include "service.hpp"

namespace mixed_reward::cli {
namespace {

using nlohmann::json;

void report_issue(std::ostream& err, const Issue& issue) {
  err << "line " << issue.line_no;
  if (!issue.id.empty()) err << " (" << issue.id << ")";
  err << ": " << to_string(issue.code) << ": " << issue.message << '\n';
}

// Runs `body` with the configured input/output streams, mapping engine
// errors to the fatal exit code.
template <typename Body>
int with_streams(const CommandOptions& options, std::istream& in, std::ostream& out, std::ostream& err, Body body) {
  std::ifstream in_file;
  std::ofstream out_file;
  std::istream* input = &in;
  std::ostream* output = &out;
  if (!options.input.empty()) {
    in_file.open(options.input, std::ios::binary);
    if (!in_file) {
      err << "error: cannot open input " << options.input << '\n';
      return kExitFatal;
    }
    input = &in_file;
  }
  if (!options.out.empty()) {
    out_file.open(options.out, std::ios::binary | std::ios::trunc);
    if (!out_file) {
      err << "error: cannot open output " << options.out << '\n';
      return kExitFatal;
    }
    output = &out_file;
  }
  try {
    validate_config(options.config);
    const int code = body(*input, *output);
    output->flush();
    if (!*output) {
      err << "error: write failed\n";
      return kExitFatal;
    }
    return code;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitFatal;
  }
}

PipelineOptions pipeline_options(const CommandOptions& options, const Embedder* embedder) {
  PipelineOptions p;
  p.config = options.config;
  p.embedder = embedder;
  p.workers = options.workers;
  return p;
}

void print_summary(std::ostream& err, const FilterReport& report) {
  err << "total=" << report.total << " kept=" << report.kept << " dropped_uniform=" << report.dropped_uniform
      << " dropped_invalid=" << report.dropped_invalid << '\n';
}

}  // namespace

std::shared_ptr<const Embedder> load_embedder(const CommandOptions& options) {
  if (options.table.empty()) return nullptr;
  if (options.vocab.empty()) {
    throw Error(ErrorCode::Io, "--vocab is required together with --table");
  }
  auto table = std::make_shared<const EmbeddingTable>(load_embedding_table(options.table, options.vocab));
  return std::make_shared<const Embedder>(std::move(table));
}

int cmd_score(const CommandOptions& options, std::istream& in, std::ostream& out, std::ostream& err) {
  return with_streams(options, in, out, err, [&](std::istream& input, std::ostream& output) {
    const auto embedder = load_embedder(options);
    PipelineSinks sinks;
    sinks.on_scored = [&](const ScoredGroup& group, bool kept) { output << scored_to_json(group, kept).dump() << '\n'; };
    sinks.on_issue = [&](const Issue& issue) { report_issue(err, issue); };
    const auto summary = run_pipeline(input, pipeline_options(options, embedder.get()), sinks);
    print_summary(err, summary.report);
    return summary.report.dropped_invalid > 0 ? kExitSoftErrors : kExitOk;
  });
}

int cmd_filter(const CommandOptions& options, std::istream& in, std::ostream& out, std::ostream& err) {
  return with_streams(options, in, out, err, [&](std::istream& input, std::ostream& output) {
    const auto embedder = load_embedder(options);
    PipelineSinks sinks;
    sinks.on_kept = [&](const Sample& sample) { output << sample_to_json(sample).dump() << '\n'; };
    sinks.on_issue = [&](const Issue& issue) { report_issue(err, issue); };
    const auto summary = run_pipeline(input, pipeline_options(options, embedder.get()), sinks);

    std::ofstream report_file(options.report, std::ios::binary | std::ios::trunc);
    if (!report_file) throw Error(ErrorCode::Io, "cannot write report " + options.report);
    report_file << json{{"filter", report_to_json(summary.report)}, {"stats", stats_to_json(summary.stats)}}.dump(2)
                << '\n';
    if (!report_file) throw Error(ErrorCode::Io, "cannot write report " + options.report);
    print_summary(err, summary.report);
    return summary.report.dropped_invalid > 0 ? kExitSoftErrors : kExitOk;
  });
}

int cmd_stats(const CommandOptions& options, std::istream& in, std::ostream& out, std::ostream& err) {
  return with_streams(options, in, out, err, [&](std::istream& input, std::ostream& output) {
    SampleReader reader(input);
    StatsAccumulator stats;
    bool soft = false;
    while (auto record = reader.next()) {
      try {
        if (!record->ok()) throw record->error();
        stats.add(validate_sample(record->sample()).data_type);
      } catch (const Error& e) {
        report_issue(err, Issue{record->line_no, record->ok() ? record->sample().id : "", e.code(), e.what()});
        soft = true;
      }
    }
    output << stats_to_json(stats.finish()).dump() << '\n';
    return soft ? kExitSoftErrors : kExitOk;
  });
}

int cmd_advantage(const CommandOptions& options, std::istream& in, std::ostream& out, std::ostream& err) {
  return with_streams(options, in, out, err, [&](std::istream& input, std::ostream& output) {
    json groups;
    try {
      groups = json::parse(input);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::JsonSyntax, e.what());
    }
    if (!groups.is_array()) throw Error(ErrorCode::SchemaViolation, "expected a JSON array of reward arrays");

    bool soft = false;
    json result = json::array();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      try {
        const auto& group = groups[g];
        if (!group.is_array()) throw Error(ErrorCode::SchemaViolation, "group is not an array");
        std::vector<double> rewards;
        for (const auto& r : group) {
          if (!r.is_number()) throw Error(ErrorCode::SchemaViolation, "reward is not a number");
          rewards.push_back(r.get<double>());
        }
        result.push_back(group_advantages(rewards, options.config.zero_std_policy).values);
      } catch (const Error& e) {
        err << "group " << g << ": " << to_string(e.code()) << ": " << e.what() << '\n';
        result.push_back(nullptr);
        soft = true;
      }
    }
    output << result.dump() << '\n';
    return soft ? kExitSoftErrors : kExitOk;
  });
}

int cmd_serve(const CommandOptions& options, std::ostream& err) {
  try {
    validate_config(options.config);
    ScoringService service(options.config, load_embedder(options));
    const int port = service.bind(options.host, options.port);
    if (port < 0) {
      err << "error: cannot bind " << options.host << ":" << options.port << '\n';
      return kExitFatal;
    }
    err << "listening on " << options.host << ":" << port << '\n';
    return service.listen() ? kExitOk : kExitFatal;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitFatal;
  }
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixed-reward scoring engine for GRPO post-training", "mixed-reward"};
  app.require_subcommand(1);
  CommandOptions options;
  std::string tol_mode = "abs";
  std::string variant = "bmas";

  const std::map<std::string, ChartToleranceMode> tol_modes{{"abs", ChartToleranceMode::Absolute},
                                                            {"rel", ChartToleranceMode::Relative}};
  const std::map<std::string, OpenRewardVariant> variants{{"bmas", OpenRewardVariant::Bmas},
                                                          {"bipartite", OpenRewardVariant::Bipartite},
                                                          {"meanpool", OpenRewardVariant::Meanpool}};

  auto add_io = [&](CLI::App* cmd) {
    cmd->add_option("--input", options.input, "Input file (default: stdin)");
    cmd->add_option("--out", options.out, "Output file (default: stdout)");
  };
  auto add_scoring = [&](CLI::App* cmd) {
    cmd->add_option("--table", options.table, "Embedding table (MRE1)")->envname("MIXED_REWARD_TABLE");
    cmd->add_option("--vocab", options.vocab, "Vocabulary file, one token per line");
    cmd->add_option("--lambda", options.config.lambda, "Format reward weight")->capture_default_str();
    cmd->add_option("--chart-tol", options.config.chart_tolerance, "Chart answer tolerance")->capture_default_str();
    cmd->add_option("--chart-tol-mode", tol_mode, "Chart tolerance mode")
        ->check(CLI::IsMember(tol_modes))
        ->capture_default_str();
    cmd->add_option("--open-variant", variant, "Open-ended reward aggregator")
        ->check(CLI::IsMember(variants))
        ->capture_default_str();
  };
  auto add_grpo = [&](CLI::App* cmd) {
    cmd->add_option("--epsilon", options.config.epsilon_clip, "GRPO clip range")->capture_default_str();
    cmd->add_option("--beta", options.config.beta_kl, "KL penalty weight")->capture_default_str();
  };
  auto add_workers = [&](CLI::App* cmd) {
    cmd->add_option("--workers", options.workers, "Scoring threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
  };

  auto* score = app.add_subcommand("score", "Score samples.jsonl into scored.jsonl");
  add_io(score);
  add_scoring(score);
  add_grpo(score);
  add_workers(score);

  auto* filter = app.add_subcommand("filter", "Drop zero-variance groups; write kept.jsonl and report.json");
  add_io(filter);
  add_scoring(filter);
  add_grpo(filter);
  add_workers(filter);
  filter->add_option("--report", options.report, "Report path")->capture_default_str();

  auto* stats = app.add_subcommand("stats", "Per-type counts and proportions of samples.jsonl");
  add_io(stats);

  auto* advantage = app.add_subcommand("advantage", "Group-normalized advantages of a JSON array of reward groups");
  add_io(advantage);
  add_grpo(advantage);

  auto* serve = app.add_subcommand("serve", "Run the HTTP scoring service");
  add_scoring(serve);
  add_grpo(serve);
  serve->add_option("--port", options.port, "Listen port")->check(CLI::Range(0, 65535))->capture_default_str();
  serve->add_option("--host", options.host, "Listen address")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFatal;
  }

  options.config.chart_tolerance_mode = tol_modes.at(tol_mode);
  options.config.open_reward_variant = variants.at(variant);

  if (score->parsed()) return cmd_score(options, in, out, err);
  if (filter->parsed()) return cmd_filter(options, in, out, err);
  if (stats->parsed()) return cmd_stats(options, in, out, err);
  if (advantage->parsed()) return cmd_advantage(options, in, out, err);
  return cmd_serve(options, err);
}

}  // namespace mixed_reward::cli
