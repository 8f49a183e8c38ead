#pragma once

#include <string>
#include <vector>

#include "cocte/sql/chain.hpp"

namespace cocte::rewards {

// Mean of the step scores. Throws EmptyChain for K = 0.
double pr(const std::vector<double>& step_scores);

struct RewardBreakdown {
  double pr = 0.0;
  int or_ = 0;            // binary outcome reward
  double r_train = 0.0;   // pr + or_
  double r_inf = 0.0;     // pr
};

RewardBreakdown reward_breakdown(double pr, int or_);

enum class Quadrant { PosPos, PosNeg, NegNeg, NegPos };

const char* to_string(Quadrant q);
Quadrant quadrant_from_string(const std::string& s);

// +PR iff pr >= threshold (ties count as high); +OR iff or_ == 1.
Quadrant quadrant(double pr, int or_, double pr_threshold);

struct ScoredChain {
  sql::CocteChain chain;
  std::vector<double> step_scores;
  RewardBreakdown breakdown;
  Quadrant quad = Quadrant::NegNeg;
};

struct QuadrantReport {
  double pct_pos_pos = 0.0;
  double pct_pos_neg = 0.0;
  double pct_neg_neg = 0.0;
  double pct_neg_pos = 0.0;
  double ex_accuracy = 0.0;  // percent with or_ == 1
  size_t total = 0;
  double pr_threshold = 0.5;
};

QuadrantReport quadrant_report(const std::vector<ScoredChain>& samples,
                               double pr_threshold);

}  // namespace cocte::rewards
