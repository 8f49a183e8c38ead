#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <random>

#include "cocte/lab/world.hpp"

namespace cocte::lab {

struct StateKey {
  size_t question = 0;
  size_t position = 0;       // 1-based
  uint64_t prefix_sig = 0;   // hash of the template ids chosen so far
  auto operator<=>(const StateKey&) const = default;
};

uint64_t extend_prefix_sig(uint64_t sig, size_t action);

// Exact tabular softmax policy over the six step templates. Rows materialize
// lazily at the prior logits (zero by default, i.e. uniform);
// log-probabilities and gradients are exact. The optional prior plays the
// role of a cold-started starting point: it shifts every row by a fixed,
// state-dependent offset that updates never touch.
class CategoricalPolicy {
public:
  using PriorFn = std::function<std::array<double, kTemplatesPerStep>(const StateKey&)>;

  explicit CategoricalPolicy(double temperature = 1.0, PriorFn prior = nullptr)
      : temperature_(temperature), prior_(std::move(prior)) {}

  std::array<double, kTemplatesPerStep> probs(const StateKey& s) const;
  double logprob(const StateKey& s, size_t action) const;
  size_t sample(const StateKey& s, std::mt19937_64& rng) const;
  size_t greedy(const StateKey& s) const;  // argmax, lowest index wins ties

  void add_to_logit(const StateKey& s, size_t action, double delta);

  // Total variation distance between this policy and `other` at one state.
  double total_variation(const StateKey& s, const CategoricalPolicy& other) const;

  double temperature() const { return temperature_; }
  size_t table_size() const { return logits_.size(); }
  const std::map<StateKey, std::array<double, kTemplatesPerStep>>& table() const {
    return logits_;
  }

private:
  std::array<double, kTemplatesPerStep> row(const StateKey& s) const;

  std::map<StateKey, std::array<double, kTemplatesPerStep>> logits_;
  double temperature_;
  PriorFn prior_;
};

}  // namespace cocte::lab
