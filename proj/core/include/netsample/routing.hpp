#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "netsample/trace.hpp"

namespace netsample {

enum class RoutingKind {
  kSingleSwitch,
  kUniformSubset,       // each switch sees each packet with a fixed probability
  kHopCount,            // hop count per packet from the Internet model
  kFixedPathPerFlow,    // hop-count path drawn once per flow
};

std::string_view routing_kind_name(RoutingKind kind);
RoutingKind parse_routing_kind(std::string_view name);

struct RoutingModel {
  RoutingKind kind = RoutingKind::kSingleSwitch;
  std::size_t switches = 1;
  double subset_probability = 0.5;
  double hop_nodes = 98400.0;
  std::size_t hop_k_max = 30;
};

// Packet indices observed by each switch, in stream order.
struct Routing {
  std::vector<std::vector<std::uint32_t>> per_switch;

  std::size_t total_observations() const;
};

// Every packet lands on a non-empty subset of the switches.
Routing route(const Trace& trace, const RoutingModel& model, std::uint64_t seed);

}  // namespace netsample
