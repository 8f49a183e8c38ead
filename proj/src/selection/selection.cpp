#include "cocte/selection/selection.hpp"

#include <algorithm>

#include "cocte/errors.hpp"

namespace cocte::selection {

namespace {

size_t argmax_pr(const std::vector<Candidate>& cands, size_t limit) {
  size_t best = 0;
  for (size_t i = 1; i < limit; ++i)
    if (cands[i].pr > cands[best].pr) best = i;
  return best;
}

}  // namespace

size_t best_of_n_pr(const CandidateSet& set) {
  if (set.candidates.empty()) throw InsufficientCandidates("empty candidate set");
  return argmax_pr(set.candidates, set.candidates.size());
}

size_t self_consistency(const CandidateSet& set) {
  if (set.candidates.empty()) throw InsufficientCandidates("empty candidate set");
  const auto& cands = set.candidates;

  // equivalence classes over ok candidates by execution result
  std::vector<std::vector<size_t>> classes;
  for (size_t i = 0; i < cands.size(); ++i) {
    if (!cands[i].exec_ok) continue;
    bool placed = false;
    for (auto& cls : classes) {
      if (exec::results_match(cands[i].result, cands[cls.front()].result)) {
        cls.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back({i});
  }
  if (classes.empty()) return best_of_n_pr(set);

  auto class_top_pr = [&](const std::vector<size_t>& cls) {
    size_t best = cls.front();
    for (size_t i : cls)
      if (cands[i].pr > cands[best].pr) best = i;
    return best;
  };

  size_t winner = 0;
  for (size_t c = 1; c < classes.size(); ++c) {
    if (classes[c].size() > classes[winner].size()) {
      winner = c;
    } else if (classes[c].size() == classes[winner].size()) {
      if (cands[class_top_pr(classes[c])].pr > cands[class_top_pr(classes[winner])].pr)
        winner = c;
    }
  }
  return class_top_pr(classes[winner]);
}

size_t orm_select(const CandidateSet& set) {
  if (set.candidates.empty()) throw InsufficientCandidates("empty candidate set");
  const auto& cands = set.candidates;
  size_t best = 0;
  double best_score = cands[0].step_scores.empty() ? 0.0 : cands[0].step_scores.back();
  for (size_t i = 1; i < cands.size(); ++i) {
    double s = cands[i].step_scores.empty() ? 0.0 : cands[i].step_scores.back();
    if (s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

std::vector<ScalingPoint> scaling_curve(const std::vector<CandidateSet>& sets,
                                        const std::vector<size_t>& ns) {
  if (sets.empty()) throw InsufficientCandidates("no candidate sets");
  size_t need = 0;
  for (size_t n : ns) need = std::max(need, n);
  for (const auto& s : sets)
    if (s.candidates.size() < need)
      throw InsufficientCandidates("question '" + s.question_id + "' has " +
                                   std::to_string(s.candidates.size()) +
                                   " candidates, need " + std::to_string(need));

  std::vector<ScalingPoint> curve;
  for (size_t n : ns) {
    ScalingPoint p;
    p.n = n;
    size_t pass_hits = 0, prm_hits = 0;
    for (const auto& s : sets) {
      bool any = false;
      for (size_t i = 0; i < n; ++i)
        if (s.candidates[i].or_ == 1) any = true;
      if (any) ++pass_hits;
      size_t pick = argmax_pr(s.candidates, n);
      if (s.candidates[pick].or_ == 1) ++prm_hits;
    }
    p.pass_at_n = static_cast<double>(pass_hits) / static_cast<double>(sets.size());
    p.prm_at_n = static_cast<double>(prm_hits) / static_cast<double>(sets.size());
    curve.push_back(p);
  }
  return curve;
}

}  // namespace cocte::selection
