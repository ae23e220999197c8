#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "netsample/controller.hpp"
#include "netsample/trace.hpp"

namespace netsample {

struct GroundTruth {
  std::uint64_t total_packets = 0;
  std::uint64_t distinct_flows = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> flow_sizes;
  double theta = 0.0;
  double psi = 0.0;
  std::vector<unsigned> prefix_lengths;

  std::vector<std::uint64_t> heavy_hitters;    // f_x >= theta |S|
  std::vector<Prefix> hierarchical;            // prefix count > theta |S|
  std::vector<std::uint32_t> superspreaders;   // >= psi distinct destinations
  std::map<std::uint64_t, std::uint64_t> size_histogram;  // size -> #flows
};

GroundTruth compute_ground_truth(const Trace& trace, double theta, double psi,
                                 std::span<const unsigned> prefix_lengths);

}  // namespace netsample
