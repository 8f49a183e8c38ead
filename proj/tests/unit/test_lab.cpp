#include <doctest.h>

#include <cmath>

#include "cocte/lab/trainer.hpp"
#include "cocte/rewards/rewards.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace cocte;
using namespace cocte::lab;

namespace {

ToyWorld& world4() {
  static fixtures::TempDir dir("labworld4");
  static ToyWorld w(dir.path(), 4);
  return w;
}

ToyWorld& world3() {
  static fixtures::TempDir dir("labworld3");
  static ToyWorld w(dir.path(), 3);
  return w;
}

}  // namespace

TEST_SUITE("lab") {

TEST_CASE("world invariants: gold succeeds, plenty of sequences fail") {
  ToyWorld& w = world4();
  REQUIRE(w.question_count() == 12);
  for (size_t q = 0; q < w.question_count(); ++q) {
    CAPTURE(q);
    CHECK(w.sequence_succeeds(q, w.question(q).gold_actions));
    // wrong region / wrong category / wrong aggregate, holding the rest gold
    size_t failures = 0;
    auto gold = w.question(q).gold_actions;
    for (size_t pos = 0; pos < 3; ++pos) {
      auto variant = gold;
      variant[pos] = (gold[pos] + 1) % 5;
      if (!w.sequence_succeeds(q, variant)) ++failures;
      variant[pos] = (gold[pos] + 2) % 5;
      if (!w.sequence_succeeds(q, variant)) ++failures;
    }
    CHECK(failures >= 3);
  }
}

TEST_CASE("world invariants: every template executes at every position") {
  ToyWorld& w = world4();
  for (size_t q = 0; q < w.question_count(); ++q) {
    auto gold = w.question(q).gold_actions;
    for (size_t pos = 1; pos <= w.max_steps(); ++pos) {
      for (size_t a = 0; a < kTemplatesPerStep; ++a) {
        if (a == kStopAction && pos > 1) continue;  // stop emits no SQL
        std::vector<size_t> actions(gold.begin(), gold.begin() + (pos - 1));
        actions.push_back(a);
        auto chain = w.build_chain(q, actions);
        auto outcomes = w.step_outcomes(chain);
        CAPTURE(q);
        CAPTURE(pos);
        CAPTURE(a);
        CHECK(outcomes.back().ok());
      }
    }
  }
}

TEST_CASE("variable-length successes exist (stop now or extend with identity)") {
  ToyWorld& w = world4();
  auto gold = w.question(2).gold_actions;  // ends with stop at position 4
  CHECK(w.sequence_succeeds(2, gold));
  auto extended = gold;
  extended[3] = (5 - 2 % 5) % 5;  // identity template id for q2
  // identity extra step keeps correctness: find the identity action id
  for (size_t a = 0; a < 5; ++a) {
    if (w.step_body(2, 4, a) == "SELECT val AS val FROM s3") {
      extended[3] = a;
      break;
    }
  }
  CHECK(w.sequence_succeeds(2, extended));
  CHECK(w.build_chain(2, gold).size() == 3);
  CHECK(w.build_chain(2, extended).size() == 4);
}

TEST_CASE("policy: normalization, temperature-0 limit analogue, determinism") {
  CategoricalPolicy p;
  StateKey s{0, 1, 0};
  auto probs = p.probs(s);
  double sum = 0;
  for (double v : probs) sum += v;
  CHECK(std::fabs(sum - 1.0) < 1e-12);
  for (double v : probs) CHECK(v == doctest::Approx(1.0 / 6.0));

  p.add_to_logit(s, 3, 9.0);
  CHECK(p.greedy(s) == 3);
  auto probs2 = p.probs(s);
  sum = 0;
  for (double v : probs2) sum += v;
  CHECK(std::fabs(sum - 1.0) < 1e-12);
  CHECK(probs2[3] > 0.99);  // near-argmax mass

  std::mt19937_64 a(42), b(42);
  for (int i = 0; i < 50; ++i) CHECK(p.sample(s, a) == p.sample(s, b));
}

TEST_CASE("policy normalization holds after every training update") {
  ToyWorld& w = world4();
  CategoricalPolicy policy;
  LabScorer scorer;  // feature PRM
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.group_size = 4;
  train_grpo(w, policy, scorer, cfg, 11);
  for (const auto& [state, _] : policy.table()) {
    auto probs = policy.probs(state);
    double sum = 0;
    for (double v : probs) sum += v;
    CHECK(std::fabs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("sampled frequencies match policy probabilities within 3 sigma") {
  CategoricalPolicy p;
  StateKey s{1, 1, 0};
  p.add_to_logit(s, 0, 0.7);
  p.add_to_logit(s, 2, -0.4);
  p.add_to_logit(s, 5, 1.1);
  auto probs = p.probs(s);
  std::mt19937_64 rng(777);
  const int n = 10000;
  std::array<int, kTemplatesPerStep> counts{};
  for (int i = 0; i < n; ++i) counts[p.sample(s, rng)]++;
  for (size_t a = 0; a < kTemplatesPerStep; ++a) {
    double expect = probs[a] * n;
    double sigma = std::sqrt(n * probs[a] * (1 - probs[a]));
    CHECK(std::fabs(counts[a] - expect) <= 3.0 * sigma);
  }
}

TEST_CASE("group sampling is seed-deterministic") {
  ToyWorld& w = world4();
  CategoricalPolicy policy;
  LabScorer scorer;
  LabGroup a = sample_group(w, 1, policy, scorer, 8, 99);
  LabGroup b = sample_group(w, 1, policy, scorer, 8, 99);
  REQUIRE(a.episodes.size() == b.episodes.size());
  for (size_t i = 0; i < a.episodes.size(); ++i) {
    CHECK(a.episodes[i].actions == b.episodes[i].actions);
    CHECK(a.episodes[i].outcome == b.episodes[i].outcome);
    CHECK(a.episodes[i].scores == b.episodes[i].scores);
  }
}

TEST_CASE("zero learning rate leaves metrics flat") {
  ToyWorld& w = world4();
  CategoricalPolicy policy;
  LabScorer scorer;
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.learning_rate = 0.0;
  cfg.group_size = 4;
  auto metrics = train_grpo(w, policy, scorer, cfg, 3);
  for (const auto& m : metrics) {
    CHECK(m.greedy_ex == doctest::Approx(metrics.front().greedy_ex));
    CHECK(m.tv_drift == doctest::Approx(0.0));
  }
}

TEST_CASE("surrogate gradient wrt logits matches finite differences") {
  ToyWorld& w = world4();
  CategoricalPolicy theta;
  // a non-uniform starting point exercises the softmax jacobian
  std::mt19937_64 init_rng(5);
  CategoricalPolicy ref;
  LabScorer scorer;
  TrainConfig cfg;
  cfg.group_size = 4;

  std::vector<LabGroup> groups;
  for (size_t q : {0u, 3u}) {
    LabGroup g = sample_group(w, q, theta, scorer, cfg.group_size, 17 + q);
    groups.push_back(std::move(g));
  }
  // perturb theta after sampling so ratios differ from 1
  for (const LabGroup& g : groups)
    for (const Episode& ep : g.episodes)
      for (const auto& unit : ep.step_units)
        for (const StepRecord& sr : unit)
          theta.add_to_logit(sr.state, (sr.action + 1) % kTemplatesPerStep,
                             0.05 * static_cast<double>(init_rng() % 5));

  auto analytic = logit_gradient(groups, theta, ref, cfg);
  double worst = 0.0;
  const double h = 1e-5;
  for (const auto& [state, row] : analytic) {
    for (size_t b = 0; b < kTemplatesPerStep; ++b) {
      CategoricalPolicy plus = theta, minus = theta;
      plus.add_to_logit(state, b, h);
      minus.add_to_logit(state, b, -h);
      double fd = (surrogate_for_groups(w, groups, plus, ref, cfg) -
                   surrogate_for_groups(w, groups, minus, ref, cfg)) /
                  (2 * h);
      double denom = std::max({1.0, std::fabs(fd), std::fabs(row[b])});
      worst = std::max(worst, std::fabs(fd - row[b]) / denom);
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("training improves greedy execution accuracy") {
  ToyWorld& w = world4();
  CategoricalPolicy policy = make_warm_policy(w);
  LabScorer scorer;  // feature PRM + outcome bonus via config
  TrainConfig cfg;
  cfg.epochs = 150;
  auto before = greedy_ex(w, policy, w.train_questions());
  auto metrics = train_grpo(w, policy, scorer, cfg, 7);
  auto after = greedy_ex(w, policy, w.train_questions());
  CHECK(after > before);
  CHECK(metrics.back().greedy_ex > metrics.front().greedy_ex);
}

TEST_CASE("huge KL coefficient pins the policy to the reference") {
  ToyWorld& w = world4();
  CategoricalPolicy policy;
  CategoricalPolicy reference = policy;
  LabScorer scorer;
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.optim.beta_kl = 100.0;
  // keep gradient ascent in its stable regime for this extreme coefficient
  cfg.learning_rate = 0.01;
  cfg.inner_iters = 1;
  train_grpo(w, policy, scorer, cfg, 13);
  for (const auto& [state, _] : policy.table())
    CHECK(policy.total_variation(state, reference) <= 0.05);
}

TEST_CASE("full-run determinism under a fixed seed") {
  ToyWorld& w = world4();
  LabScorer scorer;
  TrainConfig cfg;
  cfg.epochs = 5;
  CategoricalPolicy p1, p2;
  auto m1 = train_grpo(w, p1, scorer, cfg, 123);
  auto m2 = train_grpo(w, p2, scorer, cfg, 123);
  REQUIRE(m1.size() == m2.size());
  for (size_t e = 0; e < m1.size(); ++e) {
    CHECK(m1[e].greedy_ex == m2[e].greedy_ex);
    CHECK(m1[e].mean_len == m2[e].mean_len);
    CHECK(m1[e].mean_pr == m2[e].mean_pr);
    CHECK(m1[e].objective == m2[e].objective);
  }
}

TEST_CASE("decay profile advantage examples from the optim kernel") {
  // deepseekmath on [0.9, 0.5, 0.1]
  auto dsm = optim::deepseekmath_advantages({{0.9, 0.5, 0.1}});
  CHECK(dsm[0][0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(dsm[0][1] == doctest::Approx(-1.2247448713915890).epsilon(1e-6));
  CHECK(dsm[0][2] == doctest::Approx(-1.2247448713915890).epsilon(1e-6));
  // ours with a positive chain advantage stays positive
  auto ours = optim::step_advantages(1.0, {0.9, 0.5, 0.1});
  CHECK(ours == std::vector<double>{0.9, 0.5, 0.1});
  // flat profile: both collapse to zero
  auto flat_dsm = optim::deepseekmath_advantages({{0.5, 0.5, 0.5}});
  for (double v : flat_dsm[0]) CHECK(v == 0.0);
  CHECK(optim::group_advantages({0.5, 0.5, 0.5}) == std::vector<double>{0, 0, 0});
}

TEST_CASE("reward hacking experiment: dsm position bias and formulation gap") {
  ToyWorld& w = world3();
  HackingReport report = reward_hacking_experiment(w, 25, 7);
  REQUIRE(report.positions == 3);
  REQUIRE(report.dsm.mean_adv_by_pos.size() == 3);

  // dsm mean advantage by position is non-increasing on the decay profile
  for (size_t j = 1; j < report.dsm.mean_adv_by_pos.size(); ++j)
    CHECK(report.dsm.mean_adv_by_pos[j] <= report.dsm.mean_adv_by_pos[j - 1] + 1e-9);

  // ours assigns a strictly larger mean advantage at the final position
  CHECK(report.ours_final_pos_mean > report.dsm_final_pos_mean);
}

TEST_CASE("oracle scorer: prm@G equals pass@G on held-out questions") {
  ToyWorld& w = world4();
  CategoricalPolicy policy = make_warm_policy(w);
  LabScorer oracle;
  oracle.kind = LabScorerKind::OracleOutcome;
  size_t checked = 0;
  for (size_t q : w.holdout_questions()) {
    LabGroup g = sample_group(w, q, policy, oracle, 8, 1000 + q);
    bool any = false;
    size_t best = 0;
    double best_pr = -1.0;
    for (size_t i = 0; i < g.episodes.size(); ++i) {
      if (g.episodes[i].outcome == 1) any = true;
      double pr = rewards::pr(g.episodes[i].scores);
      if (pr > best_pr) {
        best_pr = pr;
        best = i;
      }
    }
    CHECK((g.episodes[best].outcome == 1) == any);
    ++checked;
  }
  CHECK(checked == 4);
}

}  // TEST_SUITE
