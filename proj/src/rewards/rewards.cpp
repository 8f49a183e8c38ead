#include "cocte/rewards/rewards.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "cocte/errors.hpp"
#include "cocte/rewards/scorer.hpp"
#include "cocte/sql/chain.hpp"

namespace cocte::rewards {

double pr(const std::vector<double>& step_scores) {
  if (step_scores.empty()) throw EmptyChain("PR is undefined for a chain with no steps");
  double sum = std::accumulate(step_scores.begin(), step_scores.end(), 0.0);
  return sum / static_cast<double>(step_scores.size());
}

RewardBreakdown reward_breakdown(double pr, int or_) {
  RewardBreakdown b;
  b.pr = pr;
  b.or_ = or_;
  b.r_train = pr + static_cast<double>(or_);
  b.r_inf = pr;
  return b;
}

const char* to_string(Quadrant q) {
  switch (q) {
    case Quadrant::PosPos: return "+PR/+OR";
    case Quadrant::PosNeg: return "+PR/-OR";
    case Quadrant::NegNeg: return "-PR/-OR";
    case Quadrant::NegPos: return "-PR/+OR";
  }
  return "-PR/-OR";
}

Quadrant quadrant_from_string(const std::string& s) {
  if (s == "+PR/+OR") return Quadrant::PosPos;
  if (s == "+PR/-OR") return Quadrant::PosNeg;
  if (s == "-PR/+OR") return Quadrant::NegPos;
  return Quadrant::NegNeg;
}

Quadrant quadrant(double pr, int or_, double pr_threshold) {
  bool high_pr = pr >= pr_threshold;
  if (high_pr) return or_ ? Quadrant::PosPos : Quadrant::PosNeg;
  return or_ ? Quadrant::NegPos : Quadrant::NegNeg;
}

QuadrantReport quadrant_report(const std::vector<ScoredChain>& samples,
                               double pr_threshold) {
  if (samples.empty()) throw EmptyChain("quadrant report over an empty sample set");
  size_t counts[4] = {0, 0, 0, 0};
  size_t hits = 0;
  for (const ScoredChain& s : samples) {
    Quadrant q = quadrant(s.breakdown.pr, s.breakdown.or_, pr_threshold);
    counts[static_cast<int>(q)]++;
    if (s.breakdown.or_ == 1) ++hits;
  }
  double n = static_cast<double>(samples.size());
  QuadrantReport r;
  r.pct_pos_pos = 100.0 * counts[static_cast<int>(Quadrant::PosPos)] / n;
  r.pct_pos_neg = 100.0 * counts[static_cast<int>(Quadrant::PosNeg)] / n;
  r.pct_neg_neg = 100.0 * counts[static_cast<int>(Quadrant::NegNeg)] / n;
  r.pct_neg_pos = 100.0 * counts[static_cast<int>(Quadrant::NegPos)] / n;
  r.ex_accuracy = 100.0 * static_cast<double>(hits) / n;
  r.total = samples.size();
  r.pr_threshold = pr_threshold;
  return r;
}

// --- scorer plumbing ---

ChainContext build_context(const exec::QuestionInstance& instance,
                           const sql::CocteChain& chain,
                           const std::vector<exec::ExecOutcome>& step_outcomes) {
  if (step_outcomes.size() != chain.size())
    throw FeatureExtractionFailure(
        "execution outcomes (" + std::to_string(step_outcomes.size()) +
        ") do not match step count (" + std::to_string(chain.size()) + ")");
  ChainContext ctx;
  ctx.id = instance.id;
  ctx.question = instance.question;
  for (size_t i = 0; i < chain.size(); ++i) {
    StepContext sc;
    sc.sql = sql::render(chain.steps[i].body);
    sc.index = i + 1;
    sc.total = chain.size();
    sc.outcome = &step_outcomes[i];
    size_t refs = 0;
    for (const std::string& rel : sql::referenced_relations(chain.steps[i].body))
      for (size_t j = 0; j < i; ++j)
        if (rel == chain.steps[j].name) ++refs;
    sc.prior_cte_refs = refs;
    ctx.steps.push_back(std::move(sc));
  }
  return ctx;
}

double clamp_score(double s, bool* clamped) {
  constexpr double lo = 1e-6;
  constexpr double hi = 1.0 - 1e-6;
  if (std::isnan(s)) {
    if (clamped) *clamped = true;
    return lo;
  }
  if (s < lo) {
    if (clamped) *clamped = true;
    return lo;
  }
  if (s > hi) {
    if (clamped) *clamped = true;
    return hi;
  }
  return s;
}

std::vector<double> score_chain(StepScorer& scorer,
                                const exec::QuestionInstance& instance,
                                const sql::CocteChain& chain,
                                const std::vector<exec::ExecOutcome>& step_outcomes) {
  ChainContext ctx = build_context(instance, chain, step_outcomes);
  std::vector<double> scores = scorer.score(ctx);
  if (scores.size() != chain.size())
    throw ScorerUnavailable("scorer '" + scorer.name() + "' returned " +
                            std::to_string(scores.size()) + " scores for " +
                            std::to_string(chain.size()) + " steps");
  bool clamped = false;
  for (double& s : scores) s = clamp_score(s, &clamped);
  if (clamped)
    std::fprintf(stderr, "[cocte] warning: scorer '%s' produced scores outside (0,1); clamped\n",
                 scorer.name().c_str());
  return scores;
}

}  // namespace cocte::rewards
