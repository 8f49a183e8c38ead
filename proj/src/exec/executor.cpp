#include "cocte/exec/executor.hpp"

#include "cocte/errors.hpp"

namespace cocte::exec {

ExecOutcome Executor::execute_sql(const std::string& db_id,
                                  const std::string& sql) const {
  Connection conn(registry_->resolve(db_id));
  return conn.run(sql, timeout_);
}

std::vector<ExecOutcome> Executor::execute_steps(const std::string& db_id,
                                                 const sql::CocteChain& chain) const {
  Connection conn(registry_->resolve(db_id));
  std::vector<ExecOutcome> out;
  out.reserve(chain.size());
  for (size_t i = 1; i <= chain.size(); ++i) {
    try {
      out.push_back(conn.run(sql::prefix_query(chain, i), timeout_));
    } catch (const WriteRejected& e) {
      ExecOutcome failed;
      failed.status = ExecStatus::DbError;
      failed.error_text = e.what();
      out.push_back(std::move(failed));
    }
  }
  return out;
}

int Executor::outcome_reward(const QuestionInstance& instance,
                             const sql::CocteChain& chain) const {
  Connection conn(registry_->resolve(instance.db_id));
  ExecOutcome gold = conn.run(instance.gt_sql, timeout_);
  if (!gold.ok())
    throw GoldExecutionFailed("gold query for '" + instance.id +
                              "' failed: " + gold.error_text);
  return outcome_reward(instance.db_id, gold.table, chain);
}

int Executor::outcome_reward(const std::string& db_id, const ResultTable& gold,
                             const sql::CocteChain& chain) const {
  try {
    ExecOutcome cand = execute_sql(db_id, sql::serialize(chain));
    if (!cand.ok()) return 0;
    return results_match(cand.table, gold) ? 1 : 0;
  } catch (const WriteRejected&) {
    return 0;
  }
}

sql::DbSchema Executor::schema(const std::string& db_id) const {
  Connection conn(registry_->resolve(db_id));
  return conn.schema();
}

}  // namespace cocte::exec
