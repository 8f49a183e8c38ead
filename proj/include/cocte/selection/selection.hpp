#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cocte/exec/result.hpp"

namespace cocte::selection {

// One scored candidate for a question: process-reward aggregate, per-step
// scores, binary outcome, and the execution result when it ran ok.
struct Candidate {
  double pr = 0.0;
  std::vector<double> step_scores;
  int or_ = 0;
  bool exec_ok = false;
  exec::ResultTable result;  // meaningful iff exec_ok
};

struct CandidateSet {
  std::string question_id;
  std::vector<Candidate> candidates;
};

// argmax of PR (the inference reward); ties break to the lowest index.
size_t best_of_n_pr(const CandidateSet& set);

// Groups ok-candidates into execution-result equivalence classes, picks the
// largest class (ties: the class holding the highest-PR member) and returns
// that class's highest-PR member. Falls back to best_of_n_pr when nothing
// executes ok.
size_t self_consistency(const CandidateSet& set);

// Outcome-proxy baseline: argmax of the final step's score only.
size_t orm_select(const CandidateSet& set);

struct ScalingPoint {
  size_t n = 0;
  double pass_at_n = 0.0;
  double prm_at_n = 0.0;
};

// pass@n: fraction of questions whose first n candidates contain an OR=1
// chain. prm@n: fraction where best_of_n_pr over the first n candidates
// lands on an OR=1 chain. Throws InsufficientCandidates if any set is
// shorter than max(ns).
std::vector<ScalingPoint> scaling_curve(const std::vector<CandidateSet>& sets,
                                        const std::vector<size_t>& ns);

}  // namespace cocte::selection
