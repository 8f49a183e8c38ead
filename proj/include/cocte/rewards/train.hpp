#pragma once

#include <cstdint>
#include <vector>

#include "cocte/rewards/feature_prm.hpp"

namespace cocte::rewards {

struct LabeledStep {
  std::vector<double> features;
  int label = 0;  // 0 or 1
};

// Mean binary cross-entropy of the model over the batch.
double bce_loss(const FeaturePrmModel& model, const std::vector<LabeledStep>& batch);

// Analytic gradient of the mean BCE: d/dw appended with d/db as last entry.
std::vector<double> bce_gradient(const FeaturePrmModel& model,
                                 const std::vector<LabeledStep>& batch);

struct TrainResult {
  FeaturePrmModel model;
  std::vector<double> epoch_loss;  // entry 0 is the pre-training loss
  bool single_class = false;       // trained anyway, but flagged
};

// Full-batch gradient descent from zero weights. Deterministic; the seed is
// reserved for sampling-based extensions and does not affect the default
// full-batch path.
TrainResult train_prm(const std::vector<LabeledStep>& dataset, int epochs, double lr,
                      uint64_t seed);

// Max relative error between the analytic BCE gradient and central finite
// differences (h = 1e-5).
double prm_gradient_check(const FeaturePrmModel& model,
                          const std::vector<LabeledStep>& batch);

}  // namespace cocte::rewards
