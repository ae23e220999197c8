#include "netsample/ground_truth.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "netsample/error.hpp"

namespace netsample {

GroundTruth compute_ground_truth(const Trace& trace, double theta, double psi,
                                 std::span<const unsigned> prefix_lengths) {
  if (!(theta > 0.0 && theta < 1.0)) throw_invalid("theta must lie in (0, 1)");
  for (unsigned len : prefix_lengths) {
    if (len < 1 || len > 32) throw_invalid("prefix length " + std::to_string(len) + " not in [1, 32]");
  }
  GroundTruth gt;
  gt.theta = theta;
  gt.psi = psi;
  gt.prefix_lengths.assign(prefix_lengths.begin(), prefix_lengths.end());
  gt.total_packets = trace.size();
  for (const auto& p : trace.packets) ++gt.flow_sizes[p.fid];
  gt.distinct_flows = gt.flow_sizes.size();

  const double hh_cut = theta * static_cast<double>(gt.total_packets);
  std::unordered_map<std::uint32_t, std::unordered_set<std::uint32_t>> fanout;
  for (const auto& [fid, size] : gt.flow_sizes) {
    ++gt.size_histogram[size];
    if (static_cast<double>(size) >= hh_cut) gt.heavy_hitters.push_back(fid);
    if (psi > 0.0) fanout[source_address(fid)].insert(destination_address(fid));
  }
  std::sort(gt.heavy_hitters.begin(), gt.heavy_hitters.end());

  for (unsigned len : prefix_lengths) {
    std::unordered_map<std::uint32_t, std::uint64_t> agg;
    for (const auto& [fid, size] : gt.flow_sizes) agg[mask_prefix(source_address(fid), len)] += size;
    for (const auto& [prefix, count] : agg) {
      if (static_cast<double>(count) > hh_cut) gt.hierarchical.push_back({prefix, len});
    }
  }
  std::sort(gt.hierarchical.begin(), gt.hierarchical.end());
  gt.hierarchical.erase(std::unique(gt.hierarchical.begin(), gt.hierarchical.end()),
                        gt.hierarchical.end());

  for (const auto& [src, dsts] : fanout) {
    if (static_cast<double>(dsts.size()) >= psi) gt.superspreaders.push_back(src);
  }
  std::sort(gt.superspreaders.begin(), gt.superspreaders.end());
  return gt;
}

}  // namespace netsample
