#include "cocte/dedup/dedup.hpp"

#include <algorithm>
#include <stdexcept>

namespace cocte::dedup {

size_t levenshtein(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() < b.size()) std::swap(a, b);
  // two-row DP; b is the shorter sequence
  std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double normalized_distance(std::span<const std::string> a,
                           std::span<const std::string> b) {
  size_t m = std::max(a.size(), b.size());
  if (m == 0) return 0.0;
  return static_cast<double>(levenshtein(a, b)) / static_cast<double>(m);
}

FilterResult filter_similar(const std::vector<std::vector<std::string>>& sequences,
                            const std::vector<std::string>& group_ids,
                            double threshold) {
  if (sequences.size() != group_ids.size())
    throw std::invalid_argument("sequences/group_ids size mismatch");
  FilterResult result;
  for (size_t i = 0; i < sequences.size(); ++i) {
    bool keep = true;
    for (size_t k : result.retained) {
      if (group_ids[k] != group_ids[i]) continue;
      double d = normalized_distance(sequences[i], sequences[k]);
      if (d < threshold) {
        result.removed.push_back({i, k, d});
        keep = false;
        break;
      }
    }
    if (keep) result.retained.push_back(i);
  }
  return result;
}

}  // namespace cocte::dedup
