#include "netsample/routing.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "netsample/error.hpp"
#include "netsample/hashing.hpp"
#include "netsample/hop_count.hpp"
#include "netsample/random.hpp"

namespace netsample {

namespace {

std::size_t draw_hops(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform();
  return static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

// Partial Fisher-Yates: the first `count` entries of `order` become a uniform
// subset of the switches.
void choose_switches(std::vector<std::uint32_t>& order, std::size_t count, Rng& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(order[i], order[i + rng.below(order.size() - i)]);
  }
}

}  // namespace

std::string_view routing_kind_name(RoutingKind kind) {
  switch (kind) {
    case RoutingKind::kSingleSwitch: return "single";
    case RoutingKind::kUniformSubset: return "uniform-subset";
    case RoutingKind::kHopCount: return "hop-count";
    case RoutingKind::kFixedPathPerFlow: return "fixed-path";
  }
  return "single";
}

RoutingKind parse_routing_kind(std::string_view name) {
  for (auto k : {RoutingKind::kSingleSwitch, RoutingKind::kUniformSubset, RoutingKind::kHopCount,
                 RoutingKind::kFixedPathPerFlow}) {
    if (routing_kind_name(k) == name) return k;
  }
  throw_invalid("unknown routing model '" + std::string(name) + "'");
}

std::size_t Routing::total_observations() const {
  std::size_t n = 0;
  for (const auto& s : per_switch) n += s.size();
  return n;
}

Routing route(const Trace& trace, const RoutingModel& model, std::uint64_t seed) {
  if (model.switches < 1) throw_invalid("routing needs at least one switch");
  if (trace.size() > 0xffffffffULL) throw_invalid("trace too long for 32-bit packet indices");
  const std::size_t k = model.switches;
  Routing r;
  r.per_switch.resize(k);
  Rng rng(seed);
  std::vector<std::uint32_t> order(k);
  std::iota(order.begin(), order.end(), 0U);

  std::vector<double> cdf;
  if (model.kind == RoutingKind::kHopCount || model.kind == RoutingKind::kFixedPathPerFlow) {
    const auto pmf = hop_count_distribution(model.hop_nodes, model.hop_k_max);
    std::partial_sum(pmf.begin(), pmf.end(), std::back_inserter(cdf));
    cdf.back() = 1.0;
  }

  for (std::uint32_t i = 0; i < trace.size(); ++i) {
    switch (model.kind) {
      case RoutingKind::kSingleSwitch:
        r.per_switch[0].push_back(i);
        break;
      case RoutingKind::kUniformSubset: {
        bool any = false;
        for (std::size_t s = 0; s < k; ++s) {
          if (rng.bernoulli(model.subset_probability)) {
            r.per_switch[s].push_back(i);
            any = true;
          }
        }
        if (!any) r.per_switch[rng.below(k)].push_back(i);
        break;
      }
      case RoutingKind::kHopCount: {
        const std::size_t hops = std::clamp<std::size_t>(draw_hops(cdf, rng), 1, k);
        choose_switches(order, hops, rng);
        for (std::size_t h = 0; h < hops; ++h) r.per_switch[order[h]].push_back(i);
        break;
      }
      case RoutingKind::kFixedPathPerFlow: {
        // A per-flow generator makes the path a function of (seed, fid).
        Rng flow_rng(mix64(seed ^ mix64(trace.packets[i].fid)));
        std::vector<std::uint32_t> path(k);
        std::iota(path.begin(), path.end(), 0U);
        const std::size_t hops = std::clamp<std::size_t>(draw_hops(cdf, flow_rng), 1, k);
        choose_switches(path, hops, flow_rng);
        for (std::size_t h = 0; h < hops; ++h) r.per_switch[path[h]].push_back(i);
        break;
      }
    }
  }
  return r;
}

}  // namespace netsample
