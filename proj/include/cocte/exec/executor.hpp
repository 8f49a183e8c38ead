#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "cocte/exec/database.hpp"
#include "cocte/exec/result.hpp"
#include "cocte/sql/chain.hpp"

namespace cocte::exec {

// One benchmark-style question: natural-language text plus a ground-truth
// query against a registered database.
struct QuestionInstance {
  std::string id;
  std::string question;
  std::string db_id;
  std::string gt_sql;
};

// Read-only execution facade over a registry. Opens a fresh connection per
// call; safe to copy across worker threads.
class Executor {
public:
  Executor(const Registry* registry,
           std::chrono::milliseconds timeout = std::chrono::milliseconds(30000))
      : registry_(registry), timeout_(timeout) {}

  std::chrono::milliseconds timeout() const { return timeout_; }

  // Throws UnknownDatabase / WriteRejected; execution failures come back as
  // outcomes, not exceptions.
  ExecOutcome execute_sql(const std::string& db_id, const std::string& sql) const;

  // Executes prefix_query(chain, i) for every i; keeps going past failures.
  std::vector<ExecOutcome> execute_steps(const std::string& db_id,
                                         const sql::CocteChain& chain) const;

  // 1 iff the chain executes ok and matches the gold result; 0 otherwise
  // (including candidate errors and timeouts). Throws GoldExecutionFailed
  // when the gold query itself does not execute.
  int outcome_reward(const QuestionInstance& instance,
                     const sql::CocteChain& chain) const;

  // Same, with a pre-executed gold result (e.g. cached at ingest).
  int outcome_reward(const std::string& db_id, const ResultTable& gold,
                     const sql::CocteChain& chain) const;

  sql::DbSchema schema(const std::string& db_id) const;

private:
  const Registry* registry_;
  std::chrono::milliseconds timeout_;
};

}  // namespace cocte::exec
