#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "cocte/rewards/scorer.hpp"

namespace cocte::rewards {

// Feature layout, version 1:
//   0  step executes ok (0/1)
//   1  result nonempty (0/1)
//   2  log(1 + row count)
//   3  step_index / K
//   4  fraction of question content-words appearing in the step text
//   5  count of prior-CTE references
//   6  column count of the result
inline constexpr int kFeatureSpecVersion = 1;
inline constexpr size_t kFeatureCount = 7;

std::vector<double> extract_features(const ChainContext& ctx, size_t step_index);

// Logistic model over the feature vector. score = sigmoid(w.f + b), always
// strictly inside (0,1) for finite inputs.
struct FeaturePrmModel {
  int feature_spec_version = kFeatureSpecVersion;
  std::vector<double> weights = std::vector<double>(kFeatureCount, 0.0);
  double bias = 0.0;

  double score(const std::vector<double>& features) const;

  void save(const std::filesystem::path& file) const;
  static FeaturePrmModel load(const std::filesystem::path& file);

  // Hand-set weights used before any training has happened. Executing ok and
  // returning data push a step above 0.5; failing execution drops it below.
  static FeaturePrmModel default_model();
};

class FeaturePrmScorer : public StepScorer {
public:
  explicit FeaturePrmScorer(FeaturePrmModel model) : model_(std::move(model)) {}

  std::vector<double> score(const ChainContext& ctx) override;
  std::string name() const override { return "feature-prm"; }

  const FeaturePrmModel& model() const { return model_; }

private:
  FeaturePrmModel model_;
};

double sigmoid(double z);

}  // namespace cocte::rewards
