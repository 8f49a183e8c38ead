#include <doctest.h>

#include <cmath>
#include <random>

#include "cocte/errors.hpp"
#include "cocte/optim/optim.hpp"
#include "support/oracles.hpp"

using namespace cocte;
using namespace cocte::optim;

namespace {

GroupSample random_group(std::mt19937_64& rng, const OptimConfig& cfg,
                         bool avoid_clip_kinks) {
  std::uniform_real_distribution<double> score(0.05, 0.95);
  std::uniform_real_distribution<double> logp(-3.0, -0.1);
  while (true) {
    GroupSample g;
    size_t chains = 2 + rng() % 3;
    bool near_kink = false;
    for (size_t i = 0; i < chains; ++i) {
      ChainSample c;
      size_t k = 1 + rng() % 4;
      for (size_t j = 0; j < k; ++j) {
        c.step_scores.push_back(score(rng));
        c.logp_theta.push_back(logp(rng));
        c.logp_old.push_back(logp(rng));
        c.logp_ref.push_back(logp(rng));
        double r = std::exp(c.logp_theta.back() - c.logp_old.back());
        if (std::fabs(r - (1.0 - cfg.eps_clip)) < 1e-3 ||
            std::fabs(r - (1.0 + cfg.eps_clip)) < 1e-3)
          near_kink = true;
      }
      g.chains.push_back(std::move(c));
    }
    if (!avoid_clip_kinks || !near_kink) return g;
  }
}

std::vector<double> flatten_theta(const GroupSample& g) {
  std::vector<double> out;
  for (const auto& c : g.chains)
    out.insert(out.end(), c.logp_theta.begin(), c.logp_theta.end());
  return out;
}

void unflatten_theta(GroupSample& g, const std::vector<double>& flat) {
  size_t idx = 0;
  for (auto& c : g.chains)
    for (auto& v : c.logp_theta) v = flat[idx++];
}

}  // namespace

TEST_SUITE("optim") {

TEST_CASE("group advantages: frozen example") {
  auto a = group_advantages({0.8, 0.6, 0.4, 0.2});
  // oracle: mu = 0.5, population sigma = sqrt(0.05)
  double sigma = std::sqrt(0.05);
  REQUIRE(a.size() == 4);
  CHECK(a[0] == doctest::Approx(0.3 / sigma).epsilon(1e-12));
  CHECK(a[1] == doctest::Approx(0.1 / sigma).epsilon(1e-12));
  CHECK(a[2] == doctest::Approx(-0.1 / sigma).epsilon(1e-12));
  CHECK(a[3] == doctest::Approx(-0.3 / sigma).epsilon(1e-12));
  CHECK(a[0] == doctest::Approx(1.3416407864998738).epsilon(1e-9));
}

TEST_CASE("group advantages: degenerate and small groups") {
  auto zeros = group_advantages({0.5, 0.5, 0.5});
  for (double z : zeros) CHECK(z == 0.0);
  CHECK_THROWS_AS(group_advantages({0.5}), GroupTooSmall);
}

TEST_CASE("group advantages: z-score identity on random groups") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    size_t n = 2 + rng() % 14;
    std::vector<double> means(n);
    for (auto& m : means) m = dist(rng);
    auto a = group_advantages(means);
    double mu = 0.0, var = 0.0;
    for (double v : a) mu += v;
    mu /= static_cast<double>(n);
    for (double v : a) var += (v - mu) * (v - mu);
    var /= static_cast<double>(n);
    bool degenerate = std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; });
    CHECK(std::fabs(mu) < 1e-9);
    if (!degenerate) CHECK(std::fabs(var - 1.0) < 1e-9);
  }
}

TEST_CASE("step advantages: frozen examples and sign law") {
  auto pos = step_advantages(1.0, {0.9, 0.5});
  CHECK(pos[0] == doctest::Approx(0.9));
  CHECK(pos[1] == doctest::Approx(0.5));
  auto neg = step_advantages(-1.0, {0.9, 0.5});
  CHECK(neg[0] == doctest::Approx(-0.1));
  CHECK(neg[1] == doctest::Approx(-0.5));
  auto zero = step_advantages(0.0, {0.9, 0.5});
  CHECK(zero == std::vector<double>{0.0, 0.0});

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> adist(-3.0, 3.0);
  std::uniform_real_distribution<double> sdist(1e-6, 1.0 - 1e-6);
  for (int t = 0; t < 10000; ++t) {
    double a = adist(rng);
    double s1 = sdist(rng), s2 = sdist(rng);
    if (s1 > s2) std::swap(s1, s2);
    auto adv = step_advantages(a, {s1, s2});
    for (double v : adv) {
      if (a > 0) CHECK(v > 0.0);
      else if (a < 0) CHECK(v < 0.0);
      else CHECK(v == 0.0);
    }
    if (a != 0.0 && s1 < s2) CHECK(adv[0] < adv[1]);  // increasing in score
  }
}

TEST_CASE("kl_k3: frozen values and grid positivity") {
  CHECK(kl_k3(1.0) == 0.0);
  CHECK(kl_k3(2.0) == doctest::Approx(2.0 - std::log(2.0) - 1.0).epsilon(1e-12));
  CHECK(kl_k3(2.0) == doctest::Approx(0.30685281944005469).epsilon(1e-9));
  CHECK(kl_k3(0.5) == doctest::Approx(0.5 - std::log(0.5) - 1.0).epsilon(1e-12));
  CHECK(kl_k3(0.5) == doctest::Approx(0.19314718055994531).epsilon(1e-9));
  CHECK_THROWS_AS(kl_k3(0.0), NonPositiveRatio);
  CHECK_THROWS_AS(kl_k3(-1.0), NonPositiveRatio);

  for (int i = 0; i < 10000; ++i) {
    double expo = -3.0 + 6.0 * static_cast<double>(i) / 9999.0;
    double r = std::pow(10.0, expo);
    double v = kl_k3(r);
    CHECK(v >= 0.0);
    if (std::fabs(r - 1.0) > 1e-9) CHECK(v > 0.0);
  }
}

TEST_CASE("deepseekmath advantages: frozen example") {
  auto adv = deepseekmath_advantages({{0.9, 0.5, 0.1}});
  REQUIRE(adv.size() == 1);
  REQUIRE(adv[0].size() == 3);
  CHECK(adv[0][0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(adv[0][1] == doctest::Approx(-1.2247448713915890).epsilon(1e-9));
  CHECK(adv[0][2] == doctest::Approx(-1.2247448713915890).epsilon(1e-9));
}

TEST_CASE("deepseekmath advantages: flat profile and small groups") {
  auto adv = deepseekmath_advantages({{0.5, 0.5}, {0.5}});
  for (const auto& chain : adv)
    for (double v : chain) CHECK(v == 0.0);
  CHECK_THROWS_AS(deepseekmath_advantages({{0.5}}), GroupTooSmall);
}

TEST_CASE("deepseekmath advantages match flatten-normalize-suffix-sum oracle") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> dist(0.01, 0.99);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::vector<double>> group(1 + rng() % 4);
    size_t total = 0;
    for (auto& chain : group) {
      chain.resize(1 + rng() % 4);
      for (auto& s : chain) s = dist(rng);
      total += chain.size();
    }
    if (total < 2) continue;
    // oracle
    std::vector<double> flat;
    for (auto& c : group) flat.insert(flat.end(), c.begin(), c.end());
    double mu = 0, var = 0;
    for (double s : flat) mu += s;
    mu /= flat.size();
    for (double s : flat) var += (s - mu) * (s - mu);
    var /= flat.size();
    double sigma = std::sqrt(var);
    auto got = deepseekmath_advantages(group);
    for (size_t i = 0; i < group.size(); ++i) {
      for (size_t j = 0; j < group[i].size(); ++j) {
        double want = 0.0;
        if (sigma >= 1e-8)
          for (size_t l = j; l < group[i].size(); ++l)
            want += (group[i][l] - mu) / sigma;
        CHECK(got[i][j] == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("dpo loss: anchors and monotonicity") {
  DpoResult anchor = dpo_loss(-1.0, -1.0, -2.0, -2.0, 0.1);
  CHECK(anchor.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  DpoResult two = dpo_loss(2.0, 0.0, 0.0, 0.0, 1.0);
  CHECK(two.loss == doctest::Approx(std::log1p(std::exp(-2.0))).epsilon(1e-12));
  CHECK(two.loss == doctest::Approx(0.12692801104297249).epsilon(1e-9));

  double prev = dpo_loss(0.0, 0.0, 0.0, 0.0, 1.0).loss;
  for (double w = 0.25; w <= 3.0; w += 0.25) {
    double cur = dpo_loss(w, 0.0, 0.0, 0.0, 1.0).loss;
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("dpo gradient matches finite differences") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> dist(-3.0, 0.0);
  std::uniform_real_distribution<double> beta_dist(0.05, 2.0);
  for (int t = 0; t < 100; ++t) {
    double lw_t = dist(rng), lw_r = dist(rng), ll_t = dist(rng), ll_r = dist(rng);
    double beta = beta_dist(rng);
    DpoResult res = dpo_loss(lw_t, lw_r, ll_t, ll_r, beta);
    auto f = [&](const std::vector<double>& x) {
      return dpo_loss(x[0], lw_r, x[1], ll_r, beta).loss;
    };
    auto fd = oracles::finite_difference_gradient(f, {lw_t, ll_t});
    double err = oracles::max_relative_error(
        fd, {res.grad_logp_w_theta, res.grad_logp_l_theta});
    CHECK(err < 1e-4);
  }
}

TEST_CASE("rs_filter keeps strictly above tau") {
  std::vector<double> rewards = {1.8, 0.9, 1.2};
  CHECK(rs_filter(rewards, 1.0) == std::vector<size_t>{0, 2});
  CHECK(rs_filter(rewards, 2.0).empty());
  CHECK(rs_filter(rewards, -1.0) == std::vector<size_t>{0, 1, 2});
  CHECK(rs_filter({1.0}, 1.0).empty());  // strict comparison
}

TEST_CASE("grpo surrogate: identical policies reduce to mean advantage") {
  GroupSample g;
  for (int i = 0; i < 3; ++i) {
    ChainSample c;
    c.step_scores = {0.8, 0.4};
    c.logp_theta = {-1.0, -2.0};
    c.logp_old = c.logp_theta;
    c.logp_ref = c.logp_theta;
    g.chains.push_back(c);
  }
  AdvantageSet adv;
  adv.chain_advantages = {1.0, 0.0, -1.0};
  for (size_t i = 0; i < 3; ++i)
    adv.step_advantages.push_back(
        step_advantages(adv.chain_advantages[i], g.chains[i].step_scores));
  OptimConfig cfg;
  GrpoResult res = grpo_surrogate(g, adv, cfg);

  double mean = 0.0;
  for (const auto& steps : adv.step_advantages)
    for (double a : steps) mean += a / static_cast<double>(steps.size());
  mean /= 3.0;
  CHECK(res.objective == doctest::Approx(mean).epsilon(1e-12));
  CHECK(res.mean_kl == doctest::Approx(0.0));
  for (const auto& chain : res.diags)
    for (const auto& d : chain) {
      CHECK(d.ratio == doctest::Approx(1.0));
      CHECK_FALSE(d.clipped);
    }
}

TEST_CASE("grpo surrogate: clipping picks the clipped branch") {
  OptimConfig cfg;
  cfg.beta_kl = 0.0;
  GroupSample g;
  ChainSample c;
  c.step_scores = {0.5};
  double ratio = 1.0 + 2.0 * cfg.eps_clip;
  c.logp_old = {-1.0};
  c.logp_theta = {-1.0 + std::log(ratio)};
  c.logp_ref = {-1.0};
  g.chains.push_back(c);
  ChainSample other = c;
  other.logp_theta = other.logp_old;
  g.chains.push_back(other);

  AdvantageSet adv;
  adv.chain_advantages = {1.0, 0.0};
  adv.step_advantages = {{1.0}, {0.0}};
  GrpoResult res = grpo_surrogate(g, adv, cfg);
  CHECK(res.diags[0][0].clipped);
  // clipped term contributes (1+eps)*1 under 1/G weighting
  CHECK(res.objective == doctest::Approx((1.0 + cfg.eps_clip) / 2.0).epsilon(1e-12));
  CHECK(res.grad_logp_theta[0][0] == 0.0);
}

TEST_CASE("grpo surrogate: beta 0 and unit ratios give unclipped mean") {
  OptimConfig cfg;
  cfg.beta_kl = 0.0;
  GroupSample g;
  for (int i = 0; i < 2; ++i) {
    ChainSample c;
    c.step_scores = {0.6};
    c.logp_theta = {-1.5};
    c.logp_old = {-1.5};
    c.logp_ref = {-2.5};
    g.chains.push_back(c);
  }
  AdvantageSet adv;
  adv.chain_advantages = {1.0, -1.0};
  adv.step_advantages = {{0.6}, {-0.4}};
  GrpoResult res = grpo_surrogate(g, adv, cfg);
  CHECK(res.objective == doctest::Approx((0.6 - 0.4) / 2.0).epsilon(1e-12));
}

TEST_CASE("grpo gradient matches finite differences on seeded instances") {
  OptimConfig cfg;
  std::mt19937_64 rng(20240612);
  for (int t = 0; t < 100; ++t) {
    GroupSample g = random_group(rng, cfg, /*avoid_clip_kinks=*/true);
    std::vector<int> bonus(g.chains.size(), 0);
    AdvantageSet adv = compute_advantages(g, cfg.sigma_floor, &bonus);
    GrpoResult res = grpo_surrogate(g, adv, cfg);

    auto f = [&](const std::vector<double>& flat) {
      GroupSample probe = g;
      unflatten_theta(probe, flat);
      return grpo_surrogate(probe, adv, cfg).objective;
    };
    auto fd = oracles::finite_difference_gradient(f, flatten_theta(g));
    std::vector<double> analytic;
    for (const auto& chain : res.grad_logp_theta)
      analytic.insert(analytic.end(), chain.begin(), chain.end());
    CHECK(oracles::max_relative_error(fd, analytic) < 1e-4);
  }
}

TEST_CASE("grpo surrogate rejects non-finite ratios") {
  GroupSample g;
  ChainSample c;
  c.step_scores = {0.5};
  c.logp_theta = {800.0};
  c.logp_old = {-1.0};
  c.logp_ref = {-1.0};
  g.chains.push_back(c);
  g.chains.push_back(c);
  AdvantageSet adv;
  adv.chain_advantages = {0.0, 0.0};
  adv.step_advantages = {{0.1}, {0.1}};
  CHECK_THROWS_AS(grpo_surrogate(g, adv, OptimConfig{}), NonFiniteRatio);
}

}  // TEST_SUITE
