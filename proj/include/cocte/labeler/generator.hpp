#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "cocte/exec/executor.hpp"
#include "cocte/sql/chain.hpp"
#include "cocte/util/subprocess.hpp"

namespace cocte::labeler {

// Produces up to n full chain texts extending the first `prefix_len` steps
// of `chain`. Implementations must be deterministic given the rng state.
class CompletionGenerator {
public:
  virtual ~CompletionGenerator() = default;
  virtual std::vector<std::string> complete(const exec::QuestionInstance& instance,
                                            const sql::CocteChain& chain,
                                            size_t prefix_len, size_t n,
                                            std::mt19937_64& rng) = 0;
};

struct ScriptedEntry {
  std::string sql;
  double weight = 1.0;
};

// Table-driven generator for tests and the bundled corpus. Keys are
// (question id, canonical prefix WITH-clause text). When the support for a
// key has at most n entries the full support is returned, which makes label
// outcomes independent of the sampling seed; larger supports are sampled by
// weight without replacement.
class ScriptedGenerator : public CompletionGenerator {
public:
  ScriptedGenerator() = default;

  void add(const std::string& question_id, const std::string& prefix_key,
           ScriptedEntry entry);

  std::vector<std::string> complete(const exec::QuestionInstance& instance,
                                    const sql::CocteChain& chain, size_t prefix_len,
                                    size_t n, std::mt19937_64& rng) override;

  // Weighted draws with replacement from the empty-prefix support; the
  // stand-in for sampling N candidates from a policy.
  std::vector<std::string> sample_candidates(const std::string& question_id, size_t n,
                                             std::mt19937_64& rng) const;

  const std::vector<ScriptedEntry>* support(const std::string& question_id,
                                            const std::string& prefix_key) const;

  // JSON file: {"<question_id>": {"<prefix_key>": [{"sql":..., "weight":...}]}}
  static ScriptedGenerator load(const std::filesystem::path& file);

private:
  std::map<std::string, std::map<std::string, std::vector<ScriptedEntry>>> table_;
};

// Speaks the line-delimited JSON protocol with a child process:
//   request  {"question":..., "db_id":..., "prefix_sql":..., "n":...}
//   response {"completions": [...]}
class ProcessGenerator : public CompletionGenerator {
public:
  explicit ProcessGenerator(std::vector<std::string> argv);

  std::vector<std::string> complete(const exec::QuestionInstance& instance,
                                    const sql::CocteChain& chain, size_t prefix_len,
                                    size_t n, std::mt19937_64& rng) override;

private:
  util::LineProcess proc_;
};

std::string encode_completion_request(const exec::QuestionInstance& instance,
                                      const std::string& prefix_sql, size_t n);
std::vector<std::string> decode_completion_response(const std::string& body);

}  // namespace cocte::labeler
