#pragma once

#include <cstddef>
#include <vector>

namespace cocte::optim {

struct OptimConfig {
  double eps_clip = 0.2;     // clip half-width
  double beta_kl = 0.01;     // KL coefficient
  double beta_dpo = 0.1;     // DPO temperature
  double tau_rs = 1.0;       // rejection-sampling threshold
  double sigma_floor = 1e-8; // degenerate-group guard
};

// One sampled chain inside a group: step scores plus per-step
// log-probabilities under the current, behavior and reference policies.
// The CTE step is the action unit; token-level policies pre-aggregate.
struct ChainSample {
  std::vector<double> step_scores;
  std::vector<double> logp_theta;
  std::vector<double> logp_old;
  std::vector<double> logp_ref;

  double mean_score() const;
};

struct GroupSample {
  std::vector<ChainSample> chains;
};

// z-scores with population mean/std; all zeros when sigma < sigma_floor.
// Throws GroupTooSmall for fewer than 2 entries.
std::vector<double> group_advantages(const std::vector<double>& means,
                                     double sigma_floor = 1e-8);

// A_hat * s for positive chain advantage, A_hat * (1 - s) for negative,
// zeros for zero. Preserves the chain advantage's sign at every step.
std::vector<double> step_advantages(double chain_advantage,
                                    const std::vector<double>& scores);

struct AdvantageSet {
  std::vector<double> chain_advantages;              // A_hat_i
  std::vector<std::vector<double>> step_advantages;  // A_hat_i^j
};

// Convenience: group z-scores over mean step scores (optionally + outcome
// bonus), then per-step shaping.
AdvantageSet compute_advantages(const GroupSample& group, double sigma_floor,
                                const std::vector<int>* outcome_bonus = nullptr);

struct StepDiag {
  double ratio = 1.0;
  bool clipped = false;
  double kl = 0.0;
  double advantage = 0.0;
};

struct GrpoResult {
  double objective = 0.0;  // maximization objective (surrogate - beta * KL)
  double mean_kl = 0.0;
  std::vector<std::vector<StepDiag>> diags;
  // d objective / d logp_theta, same shape as the group
  std::vector<std::vector<double>> grad_logp_theta;
};

// Clipped-ratio surrogate with the k3 KL penalty, averaged 1/G * 1/K_i over
// chains and steps. Throws NonFiniteRatio when exp(logp differences) is not
// finite.
GrpoResult grpo_surrogate(const GroupSample& group, const AdvantageSet& advantages,
                          const OptimConfig& cfg);

// k3 estimator r - log r - 1 for r = pi_ref / pi_theta; >= 0, zero iff r = 1.
// Throws NonPositiveRatio for r <= 0.
double kl_k3(double ratio_ref_over_theta);
// Same value computed from u = log(ratio); numerically stable near u = 0.
double kl_k3_from_log(double log_ratio);

// Flatten-normalize all step scores across the group, then suffix-sum the
// normalized scores within each chain. Throws GroupTooSmall when the group
// holds fewer than 2 steps in total.
std::vector<std::vector<double>> deepseekmath_advantages(
    const std::vector<std::vector<double>>& group_step_scores,
    double sigma_floor = 1e-8);

struct DpoResult {
  double loss = 0.0;
  double grad_logp_w_theta = 0.0;
  double grad_logp_l_theta = 0.0;
};

// -log sigmoid(beta * ((logp_w_theta - logp_w_ref) - (logp_l_theta - logp_l_ref)))
DpoResult dpo_loss(double logp_w_theta, double logp_w_ref, double logp_l_theta,
                   double logp_l_ref, double beta);

// Indices with reward strictly above tau, in input order.
std::vector<size_t> rs_filter(const std::vector<double>& rewards, double tau);

}  // namespace cocte::optim
