#include "cocte/rewards/train.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cocte::rewards {

namespace {

double model_logit(const FeaturePrmModel& m, const std::vector<double>& f) {
  double z = m.bias;
  for (size_t i = 0; i < m.weights.size(); ++i) z += m.weights[i] * f[i];
  return z;
}

// numerically stable BCE from the logit: max(z,0) - z*y + log(1+exp(-|z|))
double bce_from_logit(double z, int y) {
  return std::max(z, 0.0) - z * static_cast<double>(y) + std::log1p(std::exp(-std::fabs(z)));
}

}  // namespace

double bce_loss(const FeaturePrmModel& model, const std::vector<LabeledStep>& batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  double total = 0.0;
  for (const LabeledStep& s : batch)
    total += bce_from_logit(model_logit(model, s.features), s.label);
  return total / static_cast<double>(batch.size());
}

std::vector<double> bce_gradient(const FeaturePrmModel& model,
                                 const std::vector<LabeledStep>& batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  std::vector<double> g(model.weights.size() + 1, 0.0);
  for (const LabeledStep& s : batch) {
    double p = sigmoid(model_logit(model, s.features));
    double err = p - static_cast<double>(s.label);
    for (size_t i = 0; i < model.weights.size(); ++i) g[i] += err * s.features[i];
    g.back() += err;
  }
  for (double& v : g) v /= static_cast<double>(batch.size());
  return g;
}

TrainResult train_prm(const std::vector<LabeledStep>& dataset, int epochs, double lr,
                      uint64_t seed) {
  (void)seed;
  if (dataset.empty()) throw std::invalid_argument("empty training dataset");
  size_t arity = dataset.front().features.size();
  for (const LabeledStep& s : dataset)
    if (s.features.size() != arity)
      throw std::invalid_argument("inconsistent feature arity in dataset");

  TrainResult result;
  result.model.weights.assign(arity, 0.0);
  result.model.bias = 0.0;

  bool has_pos = false, has_neg = false;
  for (const LabeledStep& s : dataset) (s.label == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) {
    result.single_class = true;
    std::fprintf(stderr,
                 "[cocte] warning: PRM training set contains a single class; "
                 "training anyway\n");
  }

  result.epoch_loss.push_back(bce_loss(result.model, dataset));
  for (int e = 0; e < epochs; ++e) {
    std::vector<double> g = bce_gradient(result.model, dataset);
    for (size_t i = 0; i < arity; ++i) result.model.weights[i] -= lr * g[i];
    result.model.bias -= lr * g.back();
    result.epoch_loss.push_back(bce_loss(result.model, dataset));
  }
  return result;
}

double prm_gradient_check(const FeaturePrmModel& model,
                          const std::vector<LabeledStep>& batch) {
  const double h = 1e-5;
  std::vector<double> analytic = bce_gradient(model, batch);
  double worst = 0.0;
  FeaturePrmModel probe = model;
  auto param = [&](size_t i) -> double& {
    return i < probe.weights.size() ? probe.weights[i] : probe.bias;
  };
  for (size_t i = 0; i < analytic.size(); ++i) {
    double orig = param(i);
    param(i) = orig + h;
    double fp = bce_loss(probe, batch);
    param(i) = orig - h;
    double fm = bce_loss(probe, batch);
    param(i) = orig;
    double fd = (fp - fm) / (2.0 * h);
    double denom = std::max({1.0, std::fabs(fd), std::fabs(analytic[i])});
    worst = std::max(worst, std::fabs(fd - analytic[i]) / denom);
  }
  return worst;
}

}  // namespace cocte::rewards
