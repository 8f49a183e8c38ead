#include <doctest.h>

#include <random>

#include "cocte/errors.hpp"
#include "cocte/selection/selection.hpp"
#include "support/fixtures.hpp"

using namespace cocte;
using namespace cocte::selection;

namespace {

Candidate cand(std::vector<double> scores, int or_val) {
  Candidate c;
  c.step_scores = std::move(scores);
  double sum = 0;
  for (double s : c.step_scores) sum += s;
  c.pr = c.step_scores.empty() ? 0.0 : sum / c.step_scores.size();
  c.or_ = or_val;
  c.exec_ok = false;
  return c;
}

Candidate cand_with_result(std::vector<double> scores, int or_val,
                           const exec::ResultTable& table) {
  Candidate c = cand(std::move(scores), or_val);
  c.exec_ok = true;
  c.result = table;
  return c;
}

exec::ResultTable table_of(std::vector<long long> vals) {
  exec::ResultTable t;
  t.columns = {"v"};
  for (long long v : vals) t.rows.push_back({exec::Cell::integer(v)});
  return t;
}

}  // namespace

TEST_SUITE("selection") {

TEST_CASE("best_of_n_pr: argmax with lowest-index ties") {
  CandidateSet s{"q", {cand({0.3}, 0), cand({0.9}, 1), cand({0.6}, 0)}};
  CHECK(best_of_n_pr(s) == 1);
  CandidateSet single{"q", {cand({0.4}, 0)}};
  CHECK(best_of_n_pr(single) == 0);
  CandidateSet tie{"q", {cand({0.5}, 0), cand({0.5}, 1)}};
  CHECK(best_of_n_pr(tie) == 0);
  CHECK_THROWS_AS(best_of_n_pr(CandidateSet{"q", {}}), InsufficientCandidates);
}

TEST_CASE("self consistency: majority execution class wins") {
  auto ta = table_of({1, 2});
  auto tb = table_of({9});
  CandidateSet s{"q",
                 {cand_with_result({0.2}, 1, ta), cand_with_result({0.9}, 0, tb),
                  cand_with_result({0.6}, 1, ta)}};
  // class {0,2} is larger; its higher-PR member is index 2
  CHECK(self_consistency(s) == 2);
}

TEST_CASE("self consistency: all distinct reduces to highest-PR ok candidate") {
  CandidateSet s{"q",
                 {cand_with_result({0.2}, 0, table_of({1})),
                  cand_with_result({0.8}, 0, table_of({2})),
                  cand_with_result({0.5}, 0, table_of({3}))}};
  CHECK(self_consistency(s) == 1);
}

TEST_CASE("self consistency: class ties break toward the highest-PR member") {
  auto ta = table_of({1});
  auto tb = table_of({2});
  CandidateSet s{"q",
                 {cand_with_result({0.3}, 0, ta), cand_with_result({0.9}, 0, tb),
                  cand_with_result({0.4}, 0, ta), cand_with_result({0.1}, 0, tb)}};
  // both classes have size 2; tb's top PR (0.9) beats ta's (0.4)
  CHECK(self_consistency(s) == 1);
}

TEST_CASE("self consistency: everything failing falls back to PR argmax") {
  CandidateSet s{"q", {cand({0.3}, 0), cand({0.7}, 0)}};
  CHECK(self_consistency(s) == 1);
}

TEST_CASE("orm: final-step argmax") {
  CandidateSet s{"q", {cand({0.9, 0.2}, 0), cand({0.1, 0.8}, 1)}};
  CHECK(orm_select(s) == 1);

  // K=1 chains: identical to best_of_n_pr
  CandidateSet k1{"q", {cand({0.4}, 0), cand({0.7}, 1), cand({0.5}, 0)}};
  CHECK(orm_select(k1) == best_of_n_pr(k1));

  // constructed disagreement: PR argmax != final-step argmax
  CandidateSet dis{"q", {cand({0.9, 0.1}, 0), cand({0.4, 0.6}, 0)}};
  CHECK(best_of_n_pr(dis) == 0);
  CHECK(orm_select(dis) == 1);
}

TEST_CASE("selectors are deterministic") {
  auto ta = table_of({1});
  CandidateSet s{"q",
                 {cand_with_result({0.5, 0.5}, 0, ta), cand_with_result({0.6}, 1, ta),
                  cand({0.6}, 0)}};
  for (int i = 0; i < 5; ++i) {
    CHECK(best_of_n_pr(s) == best_of_n_pr(s));
    CHECK(self_consistency(s) == self_consistency(s));
    CHECK(orm_select(s) == orm_select(s));
  }
}

TEST_CASE("scaling curve: basics and invariants") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> sdist(0.05, 0.95);
  std::vector<CandidateSet> sets;
  for (int q = 0; q < 12; ++q) {
    CandidateSet s;
    s.question_id = "q" + std::to_string(q);
    for (int i = 0; i < 32; ++i) {
      int or_val = (rng() % 4) == 0 ? 1 : 0;
      s.candidates.push_back(cand({sdist(rng)}, or_val));
    }
    sets.push_back(std::move(s));
  }
  std::vector<size_t> ns = {1, 2, 4, 8, 16, 32};
  auto curve = scaling_curve(sets, ns);
  REQUIRE(curve.size() == ns.size());

  // n=1: both equal the fraction of first candidates with OR=1
  size_t first_hits = 0;
  for (const auto& s : sets) first_hits += s.candidates[0].or_;
  CHECK(curve[0].pass_at_n == doctest::Approx(first_hits / 12.0));
  CHECK(curve[0].prm_at_n == doctest::Approx(first_hits / 12.0));

  double prev_pass = 0.0;
  for (const auto& p : curve) {
    CHECK(p.pass_at_n >= prev_pass);       // monotone non-decreasing
    CHECK(p.prm_at_n <= p.pass_at_n);      // selection cannot beat availability
    prev_pass = p.pass_at_n;
  }
}

TEST_CASE("scaling curve: oracle scorer attains pass@n exactly") {
  std::mt19937_64 rng(99);
  std::vector<CandidateSet> sets;
  for (int q = 0; q < 10; ++q) {
    CandidateSet s;
    s.question_id = "q" + std::to_string(q);
    for (int i = 0; i < 16; ++i) {
      int or_val = (rng() % 3) == 0 ? 1 : 0;
      // oracle scorer: step score equals the (clamped) outcome
      double score = or_val ? 1.0 - 1e-6 : 1e-6;
      s.candidates.push_back(cand({score}, or_val));
    }
    sets.push_back(std::move(s));
  }
  auto curve = scaling_curve(sets, {1, 2, 4, 8, 16});
  for (const auto& p : curve) CHECK(p.prm_at_n == doctest::Approx(p.pass_at_n));
}

TEST_CASE("scaling curve: insufficient candidates") {
  CandidateSet s{"q", {cand({0.5}, 0)}};
  CHECK_THROWS_AS(scaling_curve({s}, {1, 2}), InsufficientCandidates);
}

}  // TEST_SUITE
