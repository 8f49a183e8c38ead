#include "cocte/labeler/generator.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "cocte/errors.hpp"
#include "cocte/util/util.hpp"

namespace cocte::labeler {

using nlohmann::json;

void ScriptedGenerator::add(const std::string& question_id,
                            const std::string& prefix_key, ScriptedEntry entry) {
  table_[question_id][prefix_key].push_back(std::move(entry));
}

const std::vector<ScriptedEntry>* ScriptedGenerator::support(
    const std::string& question_id, const std::string& prefix_key) const {
  auto qit = table_.find(question_id);
  if (qit == table_.end()) return nullptr;
  auto pit = qit->second.find(prefix_key);
  if (pit == qit->second.end()) return nullptr;
  return &pit->second;
}

std::vector<std::string> ScriptedGenerator::complete(
    const exec::QuestionInstance& instance, const sql::CocteChain& chain,
    size_t prefix_len, size_t n, std::mt19937_64& rng) {
  std::string key = sql::prefix_with_clause(chain, prefix_len);
  const auto* entries = support(instance.id, key);
  if (!entries || entries->empty()) return {};
  std::vector<std::string> out;
  if (entries->size() <= n) {
    for (const auto& e : *entries) out.push_back(e.sql);
    return out;
  }
  // weighted sample without replacement
  std::vector<size_t> idx(entries->size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> weights;
  for (const auto& e : *entries) weights.push_back(std::max(e.weight, 0.0));
  for (size_t pick = 0; pick < n && !idx.empty(); ++pick) {
    double total = 0.0;
    for (size_t k : idx) total += weights[k];
    if (total <= 0.0) break;
    std::uniform_real_distribution<double> dist(0.0, total);
    double target = dist(rng);
    size_t chosen_pos = idx.size() - 1;
    double acc = 0.0;
    for (size_t p = 0; p < idx.size(); ++p) {
      acc += weights[idx[p]];
      if (target < acc) {
        chosen_pos = p;
        break;
      }
    }
    out.push_back((*entries)[idx[chosen_pos]].sql);
    idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(chosen_pos));
  }
  return out;
}

std::vector<std::string> ScriptedGenerator::sample_candidates(
    const std::string& question_id, size_t n, std::mt19937_64& rng) const {
  const auto* entries = support(question_id, "");
  if (!entries || entries->empty())
    throw GeneratorFailure("no candidate support for question '" + question_id + "'");
  double total = 0.0;
  for (const auto& e : *entries) total += std::max(e.weight, 0.0);
  if (total <= 0.0)
    throw GeneratorFailure("non-positive candidate weights for '" + question_id + "'");
  std::vector<std::string> out;
  out.reserve(n);
  std::uniform_real_distribution<double> dist(0.0, total);
  for (size_t i = 0; i < n; ++i) {
    double target = dist(rng);
    double acc = 0.0;
    const ScriptedEntry* chosen = &entries->back();
    for (const auto& e : *entries) {
      acc += std::max(e.weight, 0.0);
      if (target < acc) {
        chosen = &e;
        break;
      }
    }
    out.push_back(chosen->sql);
  }
  return out;
}

ScriptedGenerator ScriptedGenerator::load(const std::filesystem::path& file) {
  json j = json::parse(util::read_file(file));
  ScriptedGenerator g;
  for (auto& [qid, prefixes] : j.items()) {
    for (auto& [prefix, entries] : prefixes.items()) {
      for (auto& e : entries) {
        ScriptedEntry entry;
        entry.sql = e.at("sql").get<std::string>();
        entry.weight = e.value("weight", 1.0);
        g.add(qid, prefix, std::move(entry));
      }
    }
  }
  return g;
}

std::string encode_completion_request(const exec::QuestionInstance& instance,
                                      const std::string& prefix_sql, size_t n) {
  json req;
  req["question"] = instance.question;
  req["db_id"] = instance.db_id;
  req["prefix_sql"] = prefix_sql;
  req["n"] = n;
  return req.dump();
}

std::vector<std::string> decode_completion_response(const std::string& body) {
  json resp = json::parse(body, nullptr, false);
  if (resp.is_discarded())
    throw GeneratorFailure("generator returned invalid JSON: " + body.substr(0, 200));
  if (!resp.contains("completions") || !resp["completions"].is_array())
    throw GeneratorFailure("generator response has no 'completions' array");
  return resp["completions"].get<std::vector<std::string>>();
}

ProcessGenerator::ProcessGenerator(std::vector<std::string> argv)
    : proc_(std::move(argv)) {}

std::vector<std::string> ProcessGenerator::complete(
    const exec::QuestionInstance& instance, const sql::CocteChain& chain,
    size_t prefix_len, size_t n, std::mt19937_64& rng) {
  (void)rng;  // the child owns its randomness
  std::string reply;
  try {
    reply = proc_.round_trip(encode_completion_request(
        instance, sql::prefix_with_clause(chain, prefix_len), n));
  } catch (const std::exception& e) {
    throw GeneratorFailure(std::string("generator process failed: ") + e.what());
  }
  auto completions = decode_completion_response(reply);
  if (completions.size() > n) completions.resize(n);
  return completions;
}

}  // namespace cocte::labeler
