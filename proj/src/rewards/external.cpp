#include "cocte/rewards/external.hpp"

#include <json.hpp>

#define CPPHTTPLIB_NO_EXCEPTIONS
#include <httplib.h>

#include "cocte/errors.hpp"

namespace cocte::rewards {

using nlohmann::json;

std::string encode_score_request(const ChainContext& ctx, size_t rows_sample_limit) {
  json steps = json::array();
  for (const StepContext& s : ctx.steps) {
    json step;
    step["sql"] = s.sql;
    json cols = json::array();
    json rows = json::array();
    std::string status = "db-error";
    if (s.outcome) {
      status = exec::to_string(s.outcome->status);
      for (const auto& c : s.outcome->table.columns) cols.push_back(c);
      size_t limit = std::min(rows_sample_limit, s.outcome->table.rows.size());
      for (size_t r = 0; r < limit; ++r) {
        json row = json::array();
        for (const auto& cell : s.outcome->table.rows[r]) row.push_back(cell.canonical());
        rows.push_back(std::move(row));
      }
    }
    step["exec_columns"] = std::move(cols);
    step["exec_rows_sample"] = std::move(rows);
    step["exec_status"] = status;
    steps.push_back(std::move(step));
  }
  json req;
  req["id"] = ctx.id;
  req["question"] = ctx.question;
  req["steps"] = std::move(steps);
  return req.dump();
}

std::vector<double> decode_score_response(const std::string& body,
                                          const std::string& expected_id,
                                          size_t expected_steps) {
  json resp = json::parse(body, nullptr, false);
  if (resp.is_discarded())
    throw ScorerUnavailable("scorer returned invalid JSON: " + body.substr(0, 200));
  if (!resp.contains("scores") || !resp["scores"].is_array())
    throw ScorerUnavailable("scorer response has no 'scores' array");
  if (resp.contains("id") && resp["id"].get<std::string>() != expected_id)
    throw ScorerUnavailable("scorer response id mismatch");
  auto scores = resp["scores"].get<std::vector<double>>();
  if (scores.size() != expected_steps)
    throw ScorerUnavailable("scorer returned " + std::to_string(scores.size()) +
                            " scores for " + std::to_string(expected_steps) + " steps");
  return scores;
}

ProcessScorer::ProcessScorer(std::vector<std::string> argv) : proc_(std::move(argv)) {}

std::vector<double> ProcessScorer::score(const ChainContext& ctx) {
  std::string reply;
  try {
    reply = proc_.round_trip(encode_score_request(ctx));
  } catch (const std::exception& e) {
    throw ScorerUnavailable(std::string("scorer process failed: ") + e.what());
  }
  return decode_score_response(reply, ctx.id, ctx.steps.size());
}

HttpScorer::HttpScorer(std::string endpoint) {
  std::string rest = endpoint;
  const std::string scheme = "http://";
  if (rest.rfind(scheme, 0) == 0) rest = rest.substr(scheme.size());
  size_t slash = rest.find('/');
  if (slash != std::string::npos) {
    path_ = rest.substr(slash);
    rest = rest.substr(0, slash);
  }
  if (path_.empty() || path_ == "/") path_ = "/score";
  size_t colon = rest.find(':');
  if (colon != std::string::npos) {
    host_ = rest.substr(0, colon);
    port_ = std::stoi(rest.substr(colon + 1));
  } else {
    host_ = rest;
  }
}

std::vector<double> HttpScorer::score(const ChainContext& ctx) {
  httplib::Client client(host_, port_);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(60, 0);
  auto res = client.Post(path_, encode_score_request(ctx), "application/json");
  if (!res)
    throw ScorerUnavailable("HTTP scorer unreachable at " + host_ + ":" +
                            std::to_string(port_));
  if (res->status != 200)
    throw ScorerUnavailable("HTTP scorer returned status " + std::to_string(res->status));
  return decode_score_response(res->body, ctx.id, ctx.steps.size());
}

}  // namespace cocte::rewards
