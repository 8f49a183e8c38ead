#include "cocte/lab/policy.hpp"

#include <cmath>

#include "cocte/util/util.hpp"

namespace cocte::lab {

uint64_t extend_prefix_sig(uint64_t sig, size_t action) {
  char byte = static_cast<char>('0' + action);
  return util::fnv1a(std::string_view(&byte, 1), sig ? sig : 0xcbf29ce484222325ULL);
}

std::array<double, kTemplatesPerStep> CategoricalPolicy::row(const StateKey& s) const {
  std::array<double, kTemplatesPerStep> out{};
  auto it = logits_.find(s);
  if (it != logits_.end()) out = it->second;
  if (prior_) {
    auto p = prior_(s);
    for (size_t a = 0; a < kTemplatesPerStep; ++a) out[a] += p[a];
  }
  return out;
}

std::array<double, kTemplatesPerStep> CategoricalPolicy::probs(const StateKey& s) const {
  auto logits = row(s);
  double max_logit = logits[0];
  for (double v : logits) max_logit = std::max(max_logit, v);
  std::array<double, kTemplatesPerStep> p{};
  double sum = 0.0;
  for (size_t a = 0; a < kTemplatesPerStep; ++a) {
    p[a] = std::exp((logits[a] - max_logit) / temperature_);
    sum += p[a];
  }
  for (double& v : p) v /= sum;
  return p;
}

double CategoricalPolicy::logprob(const StateKey& s, size_t action) const {
  auto logits = row(s);
  double max_logit = logits[0];
  for (double v : logits) max_logit = std::max(max_logit, v);
  double lse = 0.0;
  for (double v : logits) lse += std::exp((v - max_logit) / temperature_);
  return (logits[action] - max_logit) / temperature_ - std::log(lse);
}

size_t CategoricalPolicy::sample(const StateKey& s, std::mt19937_64& rng) const {
  auto p = probs(s);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  double target = dist(rng);
  double acc = 0.0;
  for (size_t a = 0; a < kTemplatesPerStep; ++a) {
    acc += p[a];
    if (target < acc) return a;
  }
  return kTemplatesPerStep - 1;
}

size_t CategoricalPolicy::greedy(const StateKey& s) const {
  auto logits = row(s);
  size_t best = 0;
  for (size_t a = 1; a < kTemplatesPerStep; ++a)
    if (logits[a] > logits[best]) best = a;
  return best;
}

void CategoricalPolicy::add_to_logit(const StateKey& s, size_t action, double delta) {
  logits_[s][action] += delta;
}

double CategoricalPolicy::total_variation(const StateKey& s,
                                          const CategoricalPolicy& other) const {
  auto p = probs(s);
  auto q = other.probs(s);
  double tv = 0.0;
  for (size_t a = 0; a < kTemplatesPerStep; ++a) tv += std::fabs(p[a] - q[a]);
  return 0.5 * tv;
}

}  // namespace cocte::lab
