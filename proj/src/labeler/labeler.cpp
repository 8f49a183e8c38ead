#include "cocte/labeler/labeler.hpp"

#include <cmath>
#include <map>

#include "cocte/errors.hpp"
#include "cocte/rewards/scorer.hpp"

namespace cocte::labeler {

namespace {

// A completion succeeds when it parses and its execution matches gold.
bool completion_succeeds(const exec::Executor& executor,
                         const exec::QuestionInstance& instance,
                         const exec::ResultTable& gold, const std::string& text) {
  try {
    sql::CocteChain chain = sql::parse_cocte(text);
    return executor.outcome_reward(instance.db_id, gold, chain) == 1;
  } catch (const SyntaxError&) {
    return false;
  } catch (const UnsupportedConstruct&) {
    return false;
  }
}

}  // namespace

LabeledChain label_chain(CompletionGenerator& generator, const exec::Executor& executor,
                         const exec::QuestionInstance& instance,
                         const sql::CocteChain& chain, const LabelConfig& config,
                         uint64_t seed) {
  if (config.budget_per_step < 1)
    throw GeneratorFailure("budget_per_step must be at least 1");

  LabeledChain result;
  result.chain = chain;
  result.question_id = instance.id;
  result.labels.assign(chain.size(), 0);
  result.rollout_stats.assign(chain.size(), {});

  exec::ExecOutcome gold = executor.execute_sql(instance.db_id, instance.gt_sql);
  if (!gold.ok())
    throw GoldExecutionFailed("gold query for '" + instance.id +
                              "' failed: " + gold.error_text);

  std::mt19937_64 rng(seed);
  const size_t n = config.budget_per_step;

  auto attempt = [&](size_t step, size_t count) {
    auto completions = generator.complete(instance, chain, step, count, rng);
    auto& stats = result.rollout_stats[step - 1];
    for (const std::string& c : completions) {
      ++stats.attempts;
      if (completion_succeeds(executor, instance, gold.table, c)) ++stats.successes;
      if (stats.attempts >= n) break;
    }
  };

  if (config.mode == LabelMode::FixedBudget) {
    for (size_t j = 1; j <= chain.size(); ++j) {
      attempt(j, n);
      if (result.rollout_stats[j - 1].successes > 0) {
        result.labels[j - 1] = 1;
      } else {
        result.first_error = j;
        break;
      }
    }
    return result;
  }

  // UCB reallocation: every explorable step first gets a floor of attempts;
  // leftover budget goes one rollout at a time to the still-unsuccessful
  // explored step with the largest exploration bonus (ties: lowest index).
  // A step that flips to success extends the frontier. Per-step attempts are
  // capped at n, which keeps the total under n * (first_error or K).
  const size_t floor_attempts = std::max<size_t>(1, n / 2);
  size_t frontier = 0;  // number of steps explored so far
  auto explore_next = [&]() -> bool {
    if (frontier >= chain.size()) return false;
    if (frontier > 0 && result.rollout_stats[frontier - 1].successes == 0) return false;
    ++frontier;
    attempt(frontier, floor_attempts);
    if (result.rollout_stats[frontier - 1].successes > 0)
      result.labels[frontier - 1] = 1;
    return true;
  };
  while (explore_next()) {}

  while (true) {
    size_t total_attempts = 0;
    for (size_t j = 0; j < frontier; ++j)
      total_attempts += result.rollout_stats[j].attempts;
    double best_bonus = -1.0;
    size_t best_step = 0;
    for (size_t j = 1; j <= frontier; ++j) {
      const auto& st = result.rollout_stats[j - 1];
      if (st.successes > 0 || st.attempts >= n) continue;
      double bonus = config.ucb_c *
                     std::sqrt(std::log(static_cast<double>(total_attempts) + 1.0) /
                               static_cast<double>(st.attempts + 1));
      if (bonus > best_bonus + 1e-12) {
        best_bonus = bonus;
        best_step = j;
      }
    }
    if (best_step == 0) break;
    attempt(best_step, 1);
    if (result.rollout_stats[best_step - 1].successes > 0) {
      result.labels[best_step - 1] = 1;
      while (explore_next()) {}
    }
  }

  for (size_t j = 1; j <= chain.size(); ++j) {
    if (result.labels[j - 1] == 0) {
      result.first_error = j;
      break;
    }
  }
  return result;
}

std::vector<rewards::LabeledStep> build_prm_dataset(
    const std::vector<LabeledChain>& labeled, const exec::Executor& executor,
    const std::vector<exec::QuestionInstance>& instances) {
  std::map<std::string, const exec::QuestionInstance*> by_id;
  for (const auto& inst : instances) by_id[inst.id] = &inst;

  std::vector<rewards::LabeledStep> dataset;
  for (const LabeledChain& lc : labeled) {
    if (!lc.gold_ok) continue;  // noisy annotation: broken gold
    auto it = by_id.find(lc.question_id);
    if (it == by_id.end()) continue;
    const exec::QuestionInstance& inst = *it->second;

    size_t explored = lc.first_error ? *lc.first_error : lc.chain.size();
    if (explored == 0) continue;
    auto outcomes = executor.execute_steps(inst.db_id, lc.chain);
    rewards::ChainContext ctx = rewards::build_context(inst, lc.chain, outcomes);
    for (size_t j = 0; j < explored; ++j) {
      // impossible state guard: a prefix that db-errors cannot be correct
      if (!outcomes[j].ok() && lc.labels[j] == 1) continue;
      rewards::LabeledStep row;
      row.features = rewards::extract_features(ctx, j);
      row.label = lc.labels[j];
      dataset.push_back(std::move(row));
    }
  }
  return dataset;
}

}  // namespace cocte::labeler
