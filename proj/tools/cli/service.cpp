#include "service.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "mixed_reward/error.hpp"
#include "mixed_reward/grpo_math.hpp"
#include "mixed_reward/sample_io.hpp"
#include "mixed_reward/scalar_rewards.hpp"

namespace mixed_reward::cli {
namespace {

using nlohmann::json;

HttpReply error_reply(int status, std::string_view code, std::string_view message) {
  json body = {{"error", message}, {"code", code}};
  return {status, body.dump(), "application/json"};
}

HttpReply error_reply(int status, const Error& e) { return error_reply(status, to_string(e.code()), e.what()); }

std::optional<json> parse_body(std::string_view body, HttpReply& failure) {
  try {
    return json::parse(body.begin(), body.end());
  } catch (const json::parse_error& e) {
    failure = error_reply(400, "JsonSyntax", e.what());
    return std::nullopt;
  }
}

}  // namespace

struct ScoringService::Server {
  httplib::Server http;
};

ScoringService::ScoringService(ScoreConfig config, std::shared_ptr<const Embedder> embedder)
    : config_(config), embedder_(std::move(embedder)), server_(std::make_unique<Server>()) {
  validate_config(config_);
  auto& http = server_->http;
  http.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });
  http.Post("/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
    const auto reply = handle_score(req.body);
    res.status = reply.status;
    res.set_content(reply.body, reply.content_type);
  });
  http.Post("/v1/advantage", [this](const httplib::Request& req, httplib::Response& res) {
    const auto reply = handle_advantage(req.body);
    res.status = reply.status;
    res.set_content(reply.body, reply.content_type);
  });
}

ScoringService::~ScoringService() { stop(); }

HttpReply ScoringService::handle_score(std::string_view body) const {
  HttpReply failure;
  const auto request = parse_body(body, failure);
  if (!request) return failure;

  Sample sample;
  try {
    sample = validate_sample(sample_from_json(*request));
  } catch (const Error& e) {
    return error_reply(is_semantic(e.code()) ? 422 : 400, e);
  } catch (const json::exception& e) {
    return error_reply(400, "SchemaViolation", e.what());
  }

  json breakdowns = json::array();
  try {
    for (const auto& response : sample.responses) {
      breakdowns.push_back(breakdown_to_json(score_response(sample, response, config_, embedder_.get())));
    }
  } catch (const Error& e) {
    return error_reply(500, e);
  }
  return {200, json{{"breakdowns", std::move(breakdowns)}}.dump(), "application/json"};
}

HttpReply ScoringService::handle_advantage(std::string_view body) const {
  HttpReply failure;
  const auto request = parse_body(body, failure);
  if (!request) return failure;

  if (!request->is_object() || !request->contains("rewards") || !(*request)["rewards"].is_array()) {
    return error_reply(400, "SchemaViolation", "body must be {\"rewards\": [numbers]}");
  }
  std::vector<double> rewards;
  for (const auto& r : (*request)["rewards"]) {
    if (!r.is_number()) return error_reply(400, "SchemaViolation", "rewards must be numbers");
    rewards.push_back(r.get<double>());
  }
  try {
    const auto adv = group_advantages(rewards, config_.zero_std_policy);
    return {200, json{{"advantages", adv.values}, {"degenerate", adv.degenerate}}.dump(), "application/json"};
  } catch (const Error& e) {
    return error_reply(422, e);
  }
}

int ScoringService::bind(const std::string& host, int port) {
  if (port == 0) return server_->http.bind_to_any_port(host);
  return server_->http.bind_to_port(host, port) ? port : -1;
}

bool ScoringService::listen() { return server_->http.listen_after_bind(); }

void ScoringService::stop() {
  if (server_) server_->http.stop();
}

void ScoringService::wait_until_ready() const { server_->http.wait_until_ready(); }

}  // namespace mixed_reward::cli
