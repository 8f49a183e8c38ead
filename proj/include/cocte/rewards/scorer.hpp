#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cocte/exec/executor.hpp"
#include "cocte/sql/chain.hpp"

namespace cocte::rewards {

// Everything a scorer may look at for one step: the step SQL, its position,
// and the execution output of the chain prefix ending at this step.
struct StepContext {
  std::string sql;               // canonical step body text
  size_t index = 0;              // 1-based
  size_t total = 0;              // K
  size_t prior_cte_refs = 0;     // references to earlier steps in this body
  const exec::ExecOutcome* outcome = nullptr;
};

struct ChainContext {
  std::string id;
  std::string question;
  std::vector<StepContext> steps;
};

// Stateless step scorer. Implementations must return one score per step and
// be deterministic for identical inputs.
class StepScorer {
public:
  virtual ~StepScorer() = default;
  virtual std::vector<double> score(const ChainContext& ctx) = 0;
  virtual std::string name() const = 0;
};

ChainContext build_context(const exec::QuestionInstance& instance,
                           const sql::CocteChain& chain,
                           const std::vector<exec::ExecOutcome>& step_outcomes);

// Runs the scorer on (question, step SQL, execution output) context and
// clamps out-of-range values into [1e-6, 1-1e-6], warning on stderr.
// Throws ScorerUnavailable if the scorer returns the wrong arity.
std::vector<double> score_chain(StepScorer& scorer,
                                const exec::QuestionInstance& instance,
                                const sql::CocteChain& chain,
                                const std::vector<exec::ExecOutcome>& step_outcomes);

double clamp_score(double s, bool* clamped = nullptr);

}  // namespace cocte::rewards
