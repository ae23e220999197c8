#include <gtest/gtest.h>

#include <cmath>

#include "netsample/error.hpp"
#include "netsample/ground_truth.hpp"
#include "netsample/metrics.hpp"

using namespace netsample;

namespace {

// Ten packets, hand-checked: A x5, B x3, C x1, D x1 where A and B share
// source 10.0.0.1 and C, D come from 10.0.1.x.
Trace hand_trace() {
  const auto a = make_flow_id(0x0a000001, 0x01010101);
  const auto b = make_flow_id(0x0a000001, 0x02020202);
  const auto c = make_flow_id(0x0a000102, 0x01010101);
  const auto d = make_flow_id(0x0a000103, 0x01010101);
  Trace t;
  const std::uint64_t order[] = {a, b, a, c, a, b, d, a, b, a};
  for (std::uint64_t i = 0; i < 10; ++i) t.packets.push_back({order[i], i});
  return t;
}

}  // namespace

TEST(GroundTruth, HandBuiltTrace) {
  const unsigned lens[] = {24, 32};
  const auto g = compute_ground_truth(hand_trace(), 0.3, 2, lens);
  EXPECT_EQ(g.total_packets, 10U);
  EXPECT_EQ(g.distinct_flows, 4U);
  EXPECT_EQ(g.flow_sizes.at(make_flow_id(0x0a000001, 0x01010101)), 5U);
  EXPECT_EQ(g.flow_sizes.at(make_flow_id(0x0a000001, 0x02020202)), 3U);
  // theta |S| = 3: A (5) and B (3) qualify under f >= 3.
  EXPECT_EQ(g.heavy_hitters, (std::vector<std::uint64_t>{make_flow_id(0x0a000001, 0x01010101),
                                                          make_flow_id(0x0a000001, 0x02020202)}));
  // Source prefixes: /24 10.0.0.0 -> 8 packets, 10.0.1.0 -> 2; /32 10.0.0.1 -> 8.
  const std::vector<Prefix> hhh{{0x0a000000, 24}, {0x0a000001, 32}};
  EXPECT_EQ(g.hierarchical, hhh);
  // Only 10.0.0.1 contacts two distinct destinations.
  EXPECT_EQ(g.superspreaders, std::vector<std::uint32_t>{0x0a000001});
  const std::map<std::uint64_t, std::uint64_t> hist{{1, 2}, {3, 1}, {5, 1}};
  EXPECT_EQ(g.size_histogram, hist);
}

TEST(GroundTruth, Consistency) {
  TraceParams p;
  p.packets = 20000;
  p.flows = 3000;
  const unsigned lens[] = {8, 16};
  const auto g = compute_ground_truth(gen_zipf_trace(p), 0.01, 100, lens);
  std::uint64_t sum_f = 0, sum_if = 0, flows = 0;
  for (const auto& [fid, f] : g.flow_sizes) sum_f += f;
  for (const auto& [i, n] : g.size_histogram) {
    sum_if += i * n;
    flows += n;
  }
  EXPECT_EQ(sum_f, g.total_packets);
  EXPECT_EQ(sum_if, g.total_packets);
  EXPECT_EQ(flows, g.distinct_flows);
  for (const auto& [fid, f] : g.flow_sizes) {
    const bool heavy = std::binary_search(g.heavy_hitters.begin(), g.heavy_hitters.end(), fid);
    EXPECT_EQ(heavy, f >= 0.01 * 20000);
  }
}

TEST(GroundTruth, BadInputs) {
  const unsigned bad[] = {0};
  EXPECT_THROW(compute_ground_truth(hand_trace(), 0.1, 1, bad), Error);
  EXPECT_THROW(compute_ground_truth(hand_trace(), 1.0, 1, {}), Error);
}

TEST(Metrics, WmrdHandExample) {
  const std::map<std::uint64_t, std::uint64_t> truth{{1, 2}, {2, 1}};
  const std::map<std::uint64_t, double> est{{1, 1}, {2, 2}};
  EXPECT_DOUBLE_EQ(metric_wmrd(est, truth), 2.0 / 3.0);
}

TEST(Metrics, WmrdLimits) {
  const std::map<std::uint64_t, std::uint64_t> truth{{1, 5}, {4, 2}};
  const std::map<std::uint64_t, double> same{{1, 5}, {4, 2}};
  EXPECT_DOUBLE_EQ(metric_wmrd(same, truth), 0.0);
  EXPECT_DOUBLE_EQ(metric_wmrd({}, {}), 0.0);
  EXPECT_DOUBLE_EQ(metric_wmrd({}, truth), 2.0);
  EXPECT_DOUBLE_EQ(metric_wmrd(same, {}), 2.0);
  const std::map<std::uint64_t, double> disjoint{{2, 5}, {7, 2}};
  EXPECT_DOUBLE_EQ(metric_wmrd(disjoint, truth), 2.0);
}

TEST(Metrics, F1HandExample) {
  const auto s = f1_from_precision_recall(0.5, 1.0);
  EXPECT_DOUBLE_EQ(s.f1, 2.0 / 3.0);
  const std::vector<int> reported{1, 2, 3, 4}, truth{1, 2};
  const auto m = metric_f1(reported, truth);
  EXPECT_DOUBLE_EQ(m.precision, 0.5);
  EXPECT_DOUBLE_EQ(m.recall, 1.0);
  EXPECT_DOUBLE_EQ(m.f1, 2.0 / 3.0);
}

TEST(Metrics, F1EdgeCases) {
  const std::vector<int> none, some{1};
  EXPECT_DOUBLE_EQ(metric_f1(some, some).f1, 1.0);
  EXPECT_DOUBLE_EQ(metric_f1(none, none).f1, 1.0);
  EXPECT_DOUBLE_EQ(metric_f1(none, some).recall, 0.0);
  EXPECT_DOUBLE_EQ(metric_f1(none, some).f1, 0.0);
  EXPECT_DOUBLE_EQ(metric_f1(some, none).precision, 0.0);
  EXPECT_DOUBLE_EQ(metric_f1(std::vector<int>{2}, some).f1, 0.0);
  EXPECT_DOUBLE_EQ(f1_from_precision_recall(0, 0).f1, 0.0);
}

TEST(Metrics, Rmse) {
  const std::unordered_map<std::uint64_t, std::uint64_t> truth{{1, 10}, {2, 4}};
  const std::unordered_map<std::uint64_t, double> perfect{{1, 10}, {2, 4}};
  EXPECT_DOUBLE_EQ(metric_rmse(perfect, truth), 0.0);
  // Missing flow 2 counts as estimate 0; extra flow 3 is ignored.
  const std::unordered_map<std::uint64_t, double> partial{{1, 13}, {3, 100}};
  EXPECT_DOUBLE_EQ(metric_rmse(partial, truth), std::sqrt((9.0 + 16.0) / 2.0));
  EXPECT_DOUBLE_EQ(metric_rmse(partial, {}), 0.0);
}
