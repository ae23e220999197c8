#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <unordered_map>
#include <vector>

namespace netsample {

// Root mean square error over the flows present in `truth`; flows missing
// from `estimate` count as estimated zero.
double metric_rmse(const std::unordered_map<std::uint64_t, double>& estimate,
                   const std::unordered_map<std::uint64_t, std::uint64_t>& truth);
double metric_rmse(const std::function<double(std::uint64_t)>& estimate,
                   const std::unordered_map<std::uint64_t, std::uint64_t>& truth);

struct F1Score {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
};

// Both inputs sorted ascending and free of duplicates. An empty report has
// precision 1; an empty truth set has recall 1.
template <typename T>
F1Score metric_f1(const std::vector<T>& reported, const std::vector<T>& truth) {
  std::vector<T> common;
  std::set_intersection(reported.begin(), reported.end(), truth.begin(), truth.end(),
                        std::back_inserter(common));
  const double tp = static_cast<double>(common.size());
  F1Score s;
  s.precision = reported.empty() ? 1.0 : tp / static_cast<double>(reported.size());
  s.recall = truth.empty() ? 1.0 : tp / static_cast<double>(truth.size());
  const double denom = s.precision + s.recall;
  s.f1 = denom == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / denom;
  return s;
}

F1Score f1_from_precision_recall(double precision, double recall);

// Weighted mean relative difference E / A between two size histograms.
// Both empty gives 0; exactly one empty gives 2.
double metric_wmrd(const std::map<std::uint64_t, double>& estimate,
                   const std::map<std::uint64_t, std::uint64_t>& truth);

}  // namespace netsample
