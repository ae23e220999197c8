#include "netsample/metrics.hpp"

#include <cmath>
#include <set>

namespace netsample {

double metric_rmse(const std::function<double(std::uint64_t)>& estimate,
                   const std::unordered_map<std::uint64_t, std::uint64_t>& truth) {
  if (truth.empty()) return 0.0;
  // Accumulate in key order so the result does not depend on hash-map layout.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> flows(truth.begin(), truth.end());
  std::sort(flows.begin(), flows.end());
  double sq = 0.0;
  for (const auto& [fid, f] : flows) {
    const double d = estimate(fid) - static_cast<double>(f);
    sq += d * d;
  }
  return std::sqrt(sq / static_cast<double>(flows.size()));
}

double metric_rmse(const std::unordered_map<std::uint64_t, double>& estimate,
                   const std::unordered_map<std::uint64_t, std::uint64_t>& truth) {
  return metric_rmse(
      [&estimate](std::uint64_t fid) {
        auto it = estimate.find(fid);
        return it == estimate.end() ? 0.0 : it->second;
      },
      truth);
}

F1Score f1_from_precision_recall(double precision, double recall) {
  F1Score s{precision, recall, 0.0};
  if (precision + recall > 0.0) s.f1 = 2.0 * precision * recall / (precision + recall);
  return s;
}

double metric_wmrd(const std::map<std::uint64_t, double>& estimate,
                   const std::map<std::uint64_t, std::uint64_t>& truth) {
  if (estimate.empty() && truth.empty()) return 0.0;
  std::set<std::uint64_t> sizes;
  for (const auto& [i, v] : estimate) sizes.insert(i);
  for (const auto& [i, v] : truth) sizes.insert(i);
  double err = 0.0;
  double avg = 0.0;
  for (std::uint64_t i : sizes) {
    const auto e = estimate.find(i);
    const auto t = truth.find(i);
    const double fe = e == estimate.end() ? 0.0 : e->second;
    const double ft = t == truth.end() ? 0.0 : static_cast<double>(t->second);
    err += std::abs(ft - fe);
    avg += (ft + fe) / 2.0;
  }
  if (avg == 0.0) return 0.0;
  return err / avg;
}

}  // namespace netsample
