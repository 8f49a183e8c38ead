#include "cocte/optim/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cocte/errors.hpp"

namespace cocte::optim {

double ChainSample::mean_score() const {
  if (step_scores.empty()) return 0.0;
  return std::accumulate(step_scores.begin(), step_scores.end(), 0.0) /
         static_cast<double>(step_scores.size());
}

std::vector<double> group_advantages(const std::vector<double>& means,
                                     double sigma_floor) {
  if (means.size() < 2)
    throw GroupTooSmall("group normalization needs at least 2 chains, got " +
                        std::to_string(means.size()));
  double mu = std::accumulate(means.begin(), means.end(), 0.0) /
              static_cast<double>(means.size());
  double var = 0.0;
  for (double m : means) var += (m - mu) * (m - mu);
  var /= static_cast<double>(means.size());  // population variance
  double sigma = std::sqrt(var);
  std::vector<double> out(means.size(), 0.0);
  if (sigma < sigma_floor) return out;
  for (size_t i = 0; i < means.size(); ++i) out[i] = (means[i] - mu) / sigma;
  return out;
}

std::vector<double> step_advantages(double chain_advantage,
                                    const std::vector<double>& scores) {
  std::vector<double> out(scores.size(), 0.0);
  if (chain_advantage == 0.0) return out;
  for (size_t j = 0; j < scores.size(); ++j) {
    out[j] = chain_advantage > 0.0 ? chain_advantage * scores[j]
                                   : chain_advantage * (1.0 - scores[j]);
  }
  return out;
}

AdvantageSet compute_advantages(const GroupSample& group, double sigma_floor,
                                const std::vector<int>* outcome_bonus) {
  std::vector<double> means;
  means.reserve(group.chains.size());
  for (size_t i = 0; i < group.chains.size(); ++i) {
    double m = group.chains[i].mean_score();
    if (outcome_bonus) m += static_cast<double>((*outcome_bonus)[i]);
    means.push_back(m);
  }
  AdvantageSet set;
  set.chain_advantages = group_advantages(means, sigma_floor);
  for (size_t i = 0; i < group.chains.size(); ++i)
    set.step_advantages.push_back(
        step_advantages(set.chain_advantages[i], group.chains[i].step_scores));
  return set;
}

double kl_k3_from_log(double log_ratio) {
  return std::expm1(log_ratio) - log_ratio;
}

double kl_k3(double ratio_ref_over_theta) {
  if (!(ratio_ref_over_theta > 0.0))
    throw NonPositiveRatio("kl_k3 requires a positive ratio, got " +
                           std::to_string(ratio_ref_over_theta));
  return kl_k3_from_log(std::log(ratio_ref_over_theta));
}

GrpoResult grpo_surrogate(const GroupSample& group, const AdvantageSet& advantages,
                          const OptimConfig& cfg) {
  const size_t g = group.chains.size();
  if (g == 0) throw GroupTooSmall("empty group");
  GrpoResult result;
  result.diags.resize(g);
  result.grad_logp_theta.resize(g);

  double inv_g = 1.0 / static_cast<double>(g);
  double kl_sum = 0.0;
  size_t kl_terms = 0;

  for (size_t i = 0; i < g; ++i) {
    const ChainSample& chain = group.chains[i];
    const size_t k = chain.step_scores.size();
    if (chain.logp_theta.size() != k || chain.logp_old.size() != k ||
        chain.logp_ref.size() != k)
      throw NonFiniteRatio("chain " + std::to_string(i) +
                           " has inconsistent step arity");
    if (advantages.step_advantages[i].size() != k)
      throw NonFiniteRatio("advantages do not match chain " + std::to_string(i));
    result.diags[i].resize(k);
    result.grad_logp_theta[i].assign(k, 0.0);
    if (k == 0) continue;
    double w = inv_g / static_cast<double>(k);

    for (size_t j = 0; j < k; ++j) {
      double a = advantages.step_advantages[i][j];
      double log_ratio = chain.logp_theta[j] - chain.logp_old[j];
      double ratio = std::exp(log_ratio);
      if (!std::isfinite(ratio))
        throw NonFiniteRatio("policy ratio overflow at chain " + std::to_string(i) +
                             " step " + std::to_string(j));
      double clipped_ratio =
          std::clamp(ratio, 1.0 - cfg.eps_clip, 1.0 + cfg.eps_clip);
      double unclipped = ratio * a;
      double clipped = clipped_ratio * a;
      bool take_clipped = clipped < unclipped;
      double term = take_clipped ? clipped : unclipped;

      // k3 estimate of KL(pi_theta || pi_ref) with rho = pi_ref / pi_theta
      double log_rho = chain.logp_ref[j] - chain.logp_theta[j];
      double rho = std::exp(log_rho);
      if (!std::isfinite(rho))
        throw NonFiniteRatio("reference ratio overflow at chain " + std::to_string(i) +
                             " step " + std::to_string(j));
      double kl = kl_k3_from_log(log_rho);

      result.objective += w * term - cfg.beta_kl * w * kl;
      kl_sum += kl;
      ++kl_terms;

      StepDiag& d = result.diags[i][j];
      d.ratio = ratio;
      d.clipped = take_clipped;
      d.kl = kl;
      d.advantage = a;

      double grad = 0.0;
      if (!take_clipped) grad += ratio * a;  // d(ratio*a)/dlogp = ratio*a
      grad -= cfg.beta_kl * (1.0 - rho);     // dkl/dlogp_theta = 1 - rho
      result.grad_logp_theta[i][j] = w * grad;
    }
  }
  result.mean_kl = kl_terms ? kl_sum / static_cast<double>(kl_terms) : 0.0;
  if (!std::isfinite(result.objective))
    throw NonFiniteRatio("GRPO objective is not finite");
  return result;
}

std::vector<std::vector<double>> deepseekmath_advantages(
    const std::vector<std::vector<double>>& group_step_scores, double sigma_floor) {
  size_t total = 0;
  for (const auto& chain : group_step_scores) total += chain.size();
  if (total < 2)
    throw GroupTooSmall("deepseekmath normalization needs at least 2 steps, got " +
                        std::to_string(total));
  double mu = 0.0;
  for (const auto& chain : group_step_scores)
    for (double s : chain) mu += s;
  mu /= static_cast<double>(total);
  double var = 0.0;
  for (const auto& chain : group_step_scores)
    for (double s : chain) var += (s - mu) * (s - mu);
  var /= static_cast<double>(total);
  double sigma = std::sqrt(var);

  std::vector<std::vector<double>> out;
  out.reserve(group_step_scores.size());
  for (const auto& chain : group_step_scores) {
    std::vector<double> adv(chain.size(), 0.0);
    if (sigma >= sigma_floor) {
      double suffix = 0.0;
      for (size_t t = chain.size(); t-- > 0;) {
        suffix += (chain[t] - mu) / sigma;
        adv[t] = suffix;
      }
    }
    out.push_back(std::move(adv));
  }
  return out;
}

namespace {

// log(1 + exp(x)) without overflow
double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid_stable(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

DpoResult dpo_loss(double logp_w_theta, double logp_w_ref, double logp_l_theta,
                   double logp_l_ref, double beta) {
  double margin = (logp_w_theta - logp_w_ref) - (logp_l_theta - logp_l_ref);
  double z = beta * margin;
  DpoResult r;
  r.loss = softplus(-z);
  double s = sigmoid_stable(-z);  // d loss / d z = -sigmoid(-z)
  r.grad_logp_w_theta = -beta * s;
  r.grad_logp_l_theta = beta * s;
  return r;
}

std::vector<size_t> rs_filter(const std::vector<double>& rewards, double tau) {
  std::vector<size_t> kept;
  for (size_t i = 0; i < rewards.size(); ++i)
    if (rewards[i] > tau) kept.push_back(i);
  return kept;
}

}  // namespace cocte::optim
