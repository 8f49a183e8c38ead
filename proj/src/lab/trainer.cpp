#include "cocte/lab/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "cocte/errors.hpp"
#include "cocte/rewards/rewards.hpp"
#include "cocte/rewards/scorer.hpp"

namespace cocte::lab {

std::vector<double> LabScorer::score(const ToyWorld& world, size_t q,
                                     const sql::CocteChain& chain, int outcome) const {
  const size_t k = chain.size();
  std::vector<double> out(k, 0.5);
  switch (kind) {
    case LabScorerKind::FeaturePrm: {
      auto outcomes = world.step_outcomes(chain);
      rewards::ChainContext ctx =
          rewards::build_context(world.instance(q), chain, outcomes);
      rewards::FeaturePrmScorer scorer(model);
      out = scorer.score(ctx);
      break;
    }
    case LabScorerKind::PositionDecay:
      for (size_t j = 0; j < k; ++j) {
        double s = j < decay_profile.size() ? decay_profile[j] : decay_profile.back();
        out[j] = rewards::clamp_score(s);
      }
      break;
    case LabScorerKind::OracleOutcome:
      for (size_t j = 0; j < k; ++j) out[j] = rewards::clamp_score(outcome ? 1.0 : 0.0);
      break;
  }
  for (double& s : out) s = rewards::clamp_score(s);
  return out;
}

Episode sample_episode(const ToyWorld& world, size_t q, const CategoricalPolicy& policy,
                       const LabScorer& scorer, std::mt19937_64& rng) {
  Episode ep;
  uint64_t sig = 0;
  for (size_t p = 1; p <= world.max_steps(); ++p) {
    StateKey state{q, p, sig};
    size_t action = policy.sample(state, rng);
    ep.actions.push_back(action);
    if (action == kStopAction && p > 1) {
      ep.step_units.back().push_back({state, action});
      break;
    }
    ep.step_units.push_back({{state, action}});
    sig = extend_prefix_sig(sig, action);
  }
  for (const auto& unit : ep.step_units) {
    double lp = 0.0;
    for (const StepRecord& sr : unit) lp += policy.logprob(sr.state, sr.action);
    ep.logp.push_back(lp);
  }
  ep.chain = world.build_chain(q, ep.actions);
  ep.outcome = world.outcome(q, ep.chain);
  ep.scores = scorer.score(world, q, ep.chain, ep.outcome);
  return ep;
}

CategoricalPolicy make_warm_policy(const ToyWorld& world, double strength) {
  auto prior = [&world, strength](const StateKey& s) {
    std::array<double, kTemplatesPerStep> row{};
    for (size_t a = 0; a < kTemplatesPerStep; ++a)
      row[a] = strength * world.hint_overlap(s.question, s.position, a);
    // length prior: ending beats padding once the chain is already long,
    // the way a cold-started model prefers finishing over filler steps
    if (s.position >= 4) row[kStopAction] += strength * 0.08;
    return row;
  };
  return CategoricalPolicy(1.0, prior);
}

optim::GroupSample LabGroup::to_group_sample(const CategoricalPolicy& theta,
                                             const CategoricalPolicy& ref) const {
  optim::GroupSample g;
  for (const Episode& ep : episodes) {
    optim::ChainSample c;
    c.step_scores = ep.scores;
    c.logp_old = ep.logp;
    for (const auto& unit : ep.step_units) {
      double lt = 0.0, lr = 0.0;
      for (const StepRecord& sr : unit) {
        lt += theta.logprob(sr.state, sr.action);
        lr += ref.logprob(sr.state, sr.action);
      }
      c.logp_theta.push_back(lt);
      c.logp_ref.push_back(lr);
    }
    g.chains.push_back(std::move(c));
  }
  return g;
}

LabGroup sample_group(const ToyWorld& world, size_t q, const CategoricalPolicy& policy,
                      const LabScorer& scorer, size_t g, uint64_t seed) {
  LabGroup group;
  group.question = q;
  std::mt19937_64 rng(seed);
  for (size_t i = 0; i < g; ++i)
    group.episodes.push_back(sample_episode(world, q, policy, scorer, rng));
  return group;
}

double greedy_ex(const ToyWorld& world, const CategoricalPolicy& policy,
                 const std::vector<size_t>& questions) {
  if (questions.empty()) return 0.0;
  size_t hits = 0;
  for (size_t q : questions) {
    std::vector<size_t> actions;
    uint64_t sig = 0;
    for (size_t p = 1; p <= world.max_steps(); ++p) {
      StateKey state{q, p, sig};
      size_t action = policy.greedy(state);
      actions.push_back(action);
      if (action == kStopAction && p > 1) break;
      sig = extend_prefix_sig(sig, action);
    }
    if (world.sequence_succeeds(q, actions)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(questions.size());
}

namespace {

optim::AdvantageSet advantages_for(const LabGroup& group,
                                   const optim::GroupSample& sample,
                                   const TrainConfig& cfg) {
  if (cfg.formulation == AdvantageFormulation::DeepSeekMathSuffix) {
    std::vector<std::vector<double>> scores;
    for (const auto& c : sample.chains) scores.push_back(c.step_scores);
    optim::AdvantageSet set;
    set.step_advantages = optim::deepseekmath_advantages(scores, cfg.optim.sigma_floor);
    set.chain_advantages.assign(sample.chains.size(), 0.0);
    return set;
  }
  std::vector<int> bonus;
  for (const Episode& ep : group.episodes) bonus.push_back(ep.outcome);
  return optim::compute_advantages(sample, cfg.optim.sigma_floor,
                                   cfg.add_outcome_to_group_score ? &bonus : nullptr);
}

}  // namespace

std::map<StateKey, std::array<double, kTemplatesPerStep>> logit_gradient(
    const std::vector<LabGroup>& groups, const CategoricalPolicy& theta,
    const CategoricalPolicy& ref, const TrainConfig& cfg) {
  std::map<StateKey, std::array<double, kTemplatesPerStep>> grad;
  for (const LabGroup& group : groups) {
    optim::GroupSample sample = group.to_group_sample(theta, ref);
    optim::AdvantageSet adv = advantages_for(group, sample, cfg);
    optim::GrpoResult res = optim::grpo_surrogate(sample, adv, cfg.optim);
    for (size_t i = 0; i < group.episodes.size(); ++i) {
      const Episode& ep = group.episodes[i];
      for (size_t j = 0; j < ep.step_units.size(); ++j) {
        double g = res.grad_logp_theta[i][j];
        if (g == 0.0) continue;
        for (const StepRecord& sr : ep.step_units[j]) {
          auto p = theta.probs(sr.state);
          auto& row = grad[sr.state];
          // d logpi(a|s) / d logit(b|s) = (1[a=b] - p_b) / temperature
          for (size_t b = 0; b < kTemplatesPerStep; ++b)
            row[b] += g * ((b == sr.action ? 1.0 : 0.0) - p[b]) / theta.temperature();
        }
      }
    }
  }
  return grad;
}

namespace {

void ascend(CategoricalPolicy& policy, const LabGroup& group,
            const CategoricalPolicy& ref, const TrainConfig& cfg, double lr) {
  auto grad = logit_gradient({group}, policy, ref, cfg);
  for (const auto& [state, row] : grad)
    for (size_t b = 0; b < kTemplatesPerStep; ++b)
      if (row[b] != 0.0) policy.add_to_logit(state, b, lr * row[b]);
}

}  // namespace

double surrogate_for_groups(const ToyWorld& world, const std::vector<LabGroup>& groups,
                            const CategoricalPolicy& theta, const CategoricalPolicy& ref,
                            const TrainConfig& cfg) {
  (void)world;
  double total = 0.0;
  for (const LabGroup& group : groups) {
    optim::GroupSample sample = group.to_group_sample(theta, ref);
    optim::AdvantageSet adv = advantages_for(group, sample, cfg);
    total += optim::grpo_surrogate(sample, adv, cfg.optim).objective;
  }
  return total;
}

std::vector<EpochMetrics> train_grpo(const ToyWorld& world, CategoricalPolicy& policy,
                                     const LabScorer& scorer, const TrainConfig& cfg,
                                     uint64_t seed) {
  CategoricalPolicy reference = policy;  // snapshot: KL anchor
  std::vector<EpochMetrics> metrics;
  std::mt19937_64 seeder(seed);

  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    EpochMetrics m;
    m.epoch = epoch;
    m.mean_adv_by_pos.assign(world.max_steps(), 0.0);
    std::vector<size_t> pos_counts(world.max_steps(), 0);
    double len_sum = 0.0, pr_sum = 0.0;
    size_t episode_count = 0;

    for (size_t q : world.train_questions()) {
      LabGroup group = sample_group(world, q, policy, scorer, cfg.group_size, seeder());
      for (const Episode& ep : group.episodes) {
        len_sum += static_cast<double>(ep.chain.size());
        pr_sum += rewards::pr(ep.scores);
        ++episode_count;
      }
      for (size_t it = 0; it < cfg.inner_iters; ++it) {
        optim::GroupSample sample = group.to_group_sample(policy, reference);
        optim::AdvantageSet adv = advantages_for(group, sample, cfg);
        optim::GrpoResult res = optim::grpo_surrogate(sample, adv, cfg.optim);
        if (!std::isfinite(res.objective))
          throw DivergenceDetected("non-finite GRPO objective");
        m.objective += res.objective;
        if (it == 0) {
          for (size_t i = 0; i < group.episodes.size(); ++i)
            for (size_t j = 0; j < adv.step_advantages[i].size(); ++j) {
              m.mean_adv_by_pos[j] += adv.step_advantages[i][j];
              pos_counts[j]++;
            }
        }
        ascend(policy, group, reference, cfg, cfg.learning_rate);
      }
    }

    for (size_t j = 0; j < m.mean_adv_by_pos.size(); ++j)
      if (pos_counts[j]) m.mean_adv_by_pos[j] /= static_cast<double>(pos_counts[j]);
    m.mean_len = episode_count ? len_sum / static_cast<double>(episode_count) : 0.0;
    m.mean_pr = episode_count ? pr_sum / static_cast<double>(episode_count) : 0.0;

    std::vector<size_t> all;
    for (size_t q = 0; q < world.question_count(); ++q) all.push_back(q);
    m.greedy_ex = greedy_ex(world, policy, all);
    m.greedy_ex_train = greedy_ex(world, policy, world.train_questions());
    m.greedy_ex_holdout = greedy_ex(world, policy, world.holdout_questions());

    double drift = 0.0;
    for (const auto& [state, _] : policy.table())
      drift = std::max(drift, policy.total_variation(state, reference));
    m.tv_drift = drift;

    metrics.push_back(std::move(m));
  }
  return metrics;
}

HackingReport reward_hacking_experiment(const ToyWorld& world, size_t epochs,
                                        uint64_t seed) {
  LabScorer decay;
  decay.kind = LabScorerKind::PositionDecay;
  decay.decay_profile = {0.9, 0.5, 0.1};

  HackingReport report;
  report.positions = world.max_steps();

  // Shared-group statistics from the initial (uniform) policy: both
  // formulations see identical samples.
  CategoricalPolicy initial;
  TrainConfig ours_cfg;
  ours_cfg.formulation = AdvantageFormulation::Ours;
  TrainConfig dsm_cfg;
  dsm_cfg.formulation = AdvantageFormulation::DeepSeekMathSuffix;
  dsm_cfg.add_outcome_to_group_score = false;

  std::vector<double> ours_sum(world.max_steps(), 0.0), dsm_sum(world.max_steps(), 0.0);
  std::vector<size_t> counts(world.max_steps(), 0);
  std::mt19937_64 seeder(seed);
  const size_t shared_groups = 60;
  for (size_t g = 0; g < shared_groups; ++g) {
    size_t q = world.train_questions()[g % world.train_questions().size()];
    LabGroup group = sample_group(world, q, initial, decay, 8, seeder());
    optim::GroupSample sample = group.to_group_sample(initial, initial);
    optim::AdvantageSet ours = advantages_for(group, sample, ours_cfg);
    optim::AdvantageSet dsm = advantages_for(group, sample, dsm_cfg);
    for (size_t i = 0; i < group.episodes.size(); ++i) {
      for (size_t j = 0; j < ours.step_advantages[i].size(); ++j) {
        ours_sum[j] += ours.step_advantages[i][j];
        dsm_sum[j] += dsm.step_advantages[i][j];
        counts[j]++;
      }
    }
  }
  report.ours.mean_adv_by_pos.assign(world.max_steps(), 0.0);
  report.dsm.mean_adv_by_pos.assign(world.max_steps(), 0.0);
  for (size_t j = 0; j < world.max_steps(); ++j) {
    if (counts[j]) {
      report.ours.mean_adv_by_pos[j] = ours_sum[j] / static_cast<double>(counts[j]);
      report.dsm.mean_adv_by_pos[j] = dsm_sum[j] / static_cast<double>(counts[j]);
    }
  }
  report.ours_final_pos_mean = report.ours.mean_adv_by_pos.back();
  report.dsm_final_pos_mean = report.dsm.mean_adv_by_pos.back();

  // Separate training runs per formulation from the same starting point.
  auto run = [&](TrainConfig cfg, FormulationStats& stats) {
    cfg.epochs = epochs;
    CategoricalPolicy policy;
    auto metrics = train_grpo(world, policy, decay, cfg, seed);
    for (const auto& m : metrics) stats.mean_len_per_epoch.push_back(m.mean_len);
    stats.final_greedy_ex = metrics.empty() ? 0.0 : metrics.back().greedy_ex;
    if (!metrics.empty())
      stats.length_contracted =
          stats.mean_len_per_epoch.back() < stats.mean_len_per_epoch.front() - 0.05;
  };
  run(ours_cfg, report.ours);
  run(dsm_cfg, report.dsm);
  return report;
}

}  // namespace cocte::lab
