#include <cmath>
#include <set>

#include "cocte/errors.hpp"
#include "cocte/rewards/feature_prm.hpp"
#include "cocte/util/util.hpp"

#include <json.hpp>

namespace cocte::rewards {

namespace {

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words = {
      "the", "and", "for", "are", "was", "were", "that", "this", "these",
      "those", "what", "which", "who", "whom", "whose", "how", "does", "did",
      "have", "has", "had", "not", "than", "then", "there", "their", "they",
      "them", "its", "per", "each", "every", "all", "any", "with", "from",
      "into", "about", "please", "show", "list", "find", "give", "return",
      "many", "much", "more", "most"};
  return words;
}

std::vector<std::string> content_words(const std::string& question) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= 3 && stopwords().count(cur) == 0) out.push_back(cur);
    cur.clear();
  };
  for (char c : question) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    else
      flush();
  }
  flush();
  return out;
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0) {
    double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> extract_features(const ChainContext& ctx, size_t step_index) {
  if (step_index >= ctx.steps.size())
    throw FeatureExtractionFailure("step index out of range");
  const StepContext& step = ctx.steps[step_index];
  if (step.outcome == nullptr)
    throw FeatureExtractionFailure("missing execution outcome for step " +
                                   std::to_string(step.index));

  const exec::ExecOutcome& out = *step.outcome;
  bool ok = out.ok();
  double rows = ok ? static_cast<double>(out.table.rows.size()) : 0.0;
  double cols = ok ? static_cast<double>(out.table.columns.size()) : 0.0;

  std::string step_lower = util::lower(step.sql);
  auto words = content_words(ctx.question);
  double overlap = 0.0;
  if (!words.empty()) {
    size_t hit = 0;
    for (const auto& w : words)
      if (step_lower.find(w) != std::string::npos) ++hit;
    overlap = static_cast<double>(hit) / static_cast<double>(words.size());
  }

  return {
      ok ? 1.0 : 0.0,
      ok && rows > 0 ? 1.0 : 0.0,
      std::log(1.0 + rows),
      step.total ? static_cast<double>(step.index) / static_cast<double>(step.total) : 0.0,
      overlap,
      static_cast<double>(step.prior_cte_refs),
      cols,
  };
}

double FeaturePrmModel::score(const std::vector<double>& features) const {
  if (features.size() != weights.size())
    throw FeatureExtractionFailure("feature arity mismatch: got " +
                                   std::to_string(features.size()) + ", model has " +
                                   std::to_string(weights.size()));
  double z = bias;
  for (size_t i = 0; i < weights.size(); ++i) z += weights[i] * features[i];
  return sigmoid(z);
}

void FeaturePrmModel::save(const std::filesystem::path& file) const {
  nlohmann::json j;
  j["feature_spec_version"] = feature_spec_version;
  j["weights"] = weights;
  j["bias"] = bias;
  util::write_file(file, j.dump(2) + "\n");
}

FeaturePrmModel FeaturePrmModel::load(const std::filesystem::path& file) {
  nlohmann::json j = nlohmann::json::parse(util::read_file(file));
  FeaturePrmModel m;
  m.feature_spec_version = j.at("feature_spec_version").get<int>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  if (m.feature_spec_version != kFeatureSpecVersion)
    throw FeatureExtractionFailure("unsupported feature_spec_version " +
                                   std::to_string(m.feature_spec_version));
  return m;
}

FeaturePrmModel FeaturePrmModel::default_model() {
  FeaturePrmModel m;
  m.weights = {1.5, 0.6, 0.1, -0.1, 0.5, 0.2, 0.05};
  m.bias = -1.2;
  return m;
}

std::vector<double> FeaturePrmScorer::score(const ChainContext& ctx) {
  std::vector<double> out;
  out.reserve(ctx.steps.size());
  for (size_t i = 0; i < ctx.steps.size(); ++i)
    out.push_back(model_.score(extract_features(ctx, i)));
  return out;
}

}  // namespace cocte::rewards
