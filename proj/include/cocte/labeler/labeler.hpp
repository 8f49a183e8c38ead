#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cocte/exec/executor.hpp"
#include "cocte/labeler/generator.hpp"
#include "cocte/rewards/train.hpp"

namespace cocte::labeler {

struct RolloutStats {
  size_t attempts = 0;
  size_t successes = 0;
};

struct LabeledChain {
  sql::CocteChain chain;
  std::string question_id;
  std::vector<int> labels;  // length K; unexplored steps stay 0
  std::optional<size_t> first_error;  // 1-based
  std::vector<RolloutStats> rollout_stats;
  bool gold_ok = true;
};

enum class LabelMode { FixedBudget, UcbRealloc };

struct LabelConfig {
  size_t budget_per_step = 8;
  LabelMode mode = LabelMode::FixedBudget;
  double ucb_c = 1.41;
};

// Monte-Carlo step labeling: step j is labeled 1 iff at least one completion
// sampled from the prefix c_1..c_j reaches OR = 1. Exploration stops at the
// first 0-labeled step. Total completions never exceed
// budget_per_step * (first_error or K).
LabeledChain label_chain(CompletionGenerator& generator, const exec::Executor& executor,
                         const exec::QuestionInstance& instance,
                         const sql::CocteChain& chain, const LabelConfig& config,
                         uint64_t seed);

// Turns labeled chains into PRM training rows: one LabeledStep per explored
// step, features extracted with execution enrichment. Steps after the first
// error are excluded, as are chains whose gold failed and steps whose prefix
// db-errors yet carry label 1.
std::vector<rewards::LabeledStep> build_prm_dataset(
    const std::vector<LabeledChain>& labeled, const exec::Executor& executor,
    const std::vector<exec::QuestionInstance>& instances);

}  // namespace cocte::labeler
