#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cocte::dedup {

size_t levenshtein(std::span<const std::string> a, std::span<const std::string> b);

// Levenshtein(a, b) / max(|a|, |b|); 0 when both sequences are empty.
// Always in [0, 1].
double normalized_distance(std::span<const std::string> a,
                           std::span<const std::string> b);

struct Removal {
  size_t index;     // removed item (input order)
  size_t neighbor;  // retained item that triggered the removal
  double distance;
};

struct FilterResult {
  std::vector<size_t> retained;  // input order
  std::vector<Removal> removed;
};

// Greedy keep-first pass in input order: item i is retained iff its distance
// to every already-retained item of the same group is >= threshold.
// Items in different groups never compete.
FilterResult filter_similar(const std::vector<std::vector<std::string>>& sequences,
                            const std::vector<std::string>& group_ids,
                            double threshold);

}  // namespace cocte::dedup
