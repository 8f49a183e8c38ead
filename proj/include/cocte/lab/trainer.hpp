#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cocte/lab/policy.hpp"
#include "cocte/lab/world.hpp"
#include "cocte/optim/optim.hpp"
#include "cocte/rewards/feature_prm.hpp"

namespace cocte::lab {

// Scorers available inside the lab. FeaturePrm mirrors production scoring;
// PositionDecay assigns scores by step position alone (the reward-hacking
// setup); OracleOutcome copies the chain's outcome into every step.
enum class LabScorerKind { FeaturePrm, PositionDecay, OracleOutcome };

struct LabScorer {
  LabScorerKind kind = LabScorerKind::FeaturePrm;
  rewards::FeaturePrmModel model = rewards::FeaturePrmModel::default_model();
  std::vector<double> decay_profile = {0.9, 0.5, 0.1, 0.05};

  std::vector<double> score(const ToyWorld& world, size_t q,
                            const sql::CocteChain& chain, int outcome) const;
};

struct StepRecord {
  StateKey state;
  size_t action = 0;
};

// One CTE step corresponds to one or two policy decisions: the template
// choice, plus the terminal stop decision folded into the last step so the
// chain probability (and its gradient) covers the choice to end the chain.
struct Episode {
  std::vector<size_t> actions;
  std::vector<std::vector<StepRecord>> step_units;  // one list per CTE step
  sql::CocteChain chain;
  int outcome = 0;
  std::vector<double> scores;
  std::vector<double> logp;  // behavior logprob per step (summed over units)
};

Episode sample_episode(const ToyWorld& world, size_t q, const CategoricalPolicy& policy,
                       const LabScorer& scorer, std::mt19937_64& rng);

// Policy whose prior nudges templates that share words with the question
// text: the stand-in for a cold-started model. Aggregate templates carry no
// overlap, so that choice is left entirely to the optimizer.
CategoricalPolicy make_warm_policy(const ToyWorld& world, double strength = 12.0);

struct LabGroup {
  size_t question = 0;
  std::vector<Episode> episodes;
  optim::GroupSample to_group_sample(const CategoricalPolicy& theta,
                                     const CategoricalPolicy& ref) const;
};

LabGroup sample_group(const ToyWorld& world, size_t q, const CategoricalPolicy& policy,
                      const LabScorer& scorer, size_t g, uint64_t seed);

enum class AdvantageFormulation { Ours, DeepSeekMathSuffix };

struct TrainConfig {
  size_t group_size = 8;
  size_t epochs = 200;
  double learning_rate = 0.1;
  size_t inner_iters = 4;  // surrogate ascent steps per sampled group
  bool add_outcome_to_group_score = true;  // s_bar_i += OR_i before z-scoring
  AdvantageFormulation formulation = AdvantageFormulation::Ours;
  optim::OptimConfig optim;
};

struct EpochMetrics {
  size_t epoch = 0;
  double greedy_ex = 0.0;          // all questions
  double greedy_ex_train = 0.0;
  double greedy_ex_holdout = 0.0;
  double mean_len = 0.0;
  double mean_pr = 0.0;
  std::vector<double> mean_adv_by_pos;  // one entry per step position
  double tv_drift = 0.0;                // max TV distance from the reference
  double objective = 0.0;
};

// Sample -> advantage -> analytic-gradient ascent on the GRPO surrogate,
// one group per training question per epoch. Mutates `policy` in place and
// returns per-epoch metrics. Throws DivergenceDetected on non-finite loss.
std::vector<EpochMetrics> train_grpo(const ToyWorld& world, CategoricalPolicy& policy,
                                     const LabScorer& scorer, const TrainConfig& cfg,
                                     uint64_t seed);

double greedy_ex(const ToyWorld& world, const CategoricalPolicy& policy,
                 const std::vector<size_t>& questions);

// Objective of the surrogate for fixed sampled trajectories as a function of
// the current policy's logits; the finite-difference anchor for gradient
// tests.
double surrogate_for_groups(const ToyWorld& world, const std::vector<LabGroup>& groups,
                            const CategoricalPolicy& theta, const CategoricalPolicy& ref,
                            const TrainConfig& cfg);

// Analytic gradient of that objective with respect to every visited logit.
std::map<StateKey, std::array<double, kTemplatesPerStep>> logit_gradient(
    const std::vector<LabGroup>& groups, const CategoricalPolicy& theta,
    const CategoricalPolicy& ref, const TrainConfig& cfg);

struct FormulationStats {
  std::vector<double> mean_adv_by_pos;    // shared initial-policy groups
  std::vector<double> mean_len_per_epoch;
  double final_greedy_ex = 0.0;
  bool length_contracted = false;
};

struct HackingReport {
  FormulationStats ours;
  FormulationStats dsm;
  double ours_final_pos_mean = 0.0;  // mean advantage at the last position
  double dsm_final_pos_mean = 0.0;
  size_t positions = 0;
};

// Trains one policy per formulation on the decay-scored world variant and
// reports advantage-by-position statistics computed on groups shared between
// the two formulations.
HackingReport reward_hacking_experiment(const ToyWorld& world, size_t epochs,
                                        uint64_t seed);

}  // namespace cocte::lab
