#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "netsample/sample_sketch.hpp"

namespace netsample {

// Network-wide sample assembled at the controller, with the derived sample
// size, distinct-count estimate and sampling probability.
class GlobalSample {
 public:
  explicit GlobalSample(SampleSketch merged);

  const SampleSketch& merged() const { return merged_; }
  SampleMode mode() const { return merged_.mode(); }
  std::uint64_t m_tilde() const { return m_tilde_; }
  double v_hat() const { return v_hat_; }
  // Empty when the sample is empty.
  std::optional<double> p_hat() const { return p_hat_; }
  const std::vector<SampleEntry>& entries() const { return entries_; }

  // Packet mode only: T_x for every flow present in the sample.
  const std::unordered_map<std::uint64_t, std::uint64_t>& flow_counts() const;

  friend bool operator==(const GlobalSample& a, const GlobalSample& b) {
    return a.merged_ == b.merged_;
  }

 private:
  SampleSketch merged_;
  std::uint64_t m_tilde_;
  double v_hat_;
  std::optional<double> p_hat_;
  std::vector<SampleEntry> entries_;
  std::unordered_map<std::uint64_t, std::uint64_t> flow_counts_;
};

GlobalSample merge_all(std::span<const SampleSketch> sketches);

// V = (alpha M)^2 / sum of slot ranks; 0 for an empty sample.
double estimate_cardinality(const SampleSketch& merged);
double estimate_cardinality(const GlobalSample& gs);

// p = M~ / V, clamped to 1. Throws when the sample is empty.
double sampling_probability(const GlobalSample& gs);

std::uint64_t sample_count(const GlobalSample& gs, std::uint64_t fid);
double estimate_frequency(const GlobalSample& gs, std::uint64_t fid);

// Flows with T_x >= theta * M~, ascending by id.
std::vector<std::uint64_t> heavy_hitters(const GlobalSample& gs, double theta);

struct Prefix {
  std::uint32_t value = 0;  // address with the host bits cleared
  unsigned length = 0;

  friend bool operator==(const Prefix&, const Prefix&) = default;
  friend auto operator<=>(const Prefix&, const Prefix&) = default;
};

std::uint32_t mask_prefix(std::uint32_t address, unsigned length);

// Source prefixes whose sampled packet count exceeds theta * M~.
std::vector<Prefix> hierarchical_heavy_hitters(const GlobalSample& gs, double theta,
                                               std::span<const unsigned> prefix_lengths);

// Flow-mode only: sources appearing in more than psi * p sampled flows.
std::vector<std::uint32_t> superspreaders(const GlobalSample& gs, double psi);

// Flow size -> estimated number of flows of that size.
using SizeHistogram = std::map<std::uint64_t, double>;

struct FsdOptions {
  // Rescale the result so it sums to the flow-sample cardinality estimate.
  bool rescale_to_flow_cardinality = false;
  unsigned max_iterations = 500;
  double tolerance = 1e-10;
};

// Reconstructed flow-size distribution. The packet-sample counts T_x are a
// binomial thinning of the true sizes at rate p; the histogram is recovered by
// expectation-maximisation, including the flows that left no sampled packet.
SizeHistogram flow_size_distribution(const GlobalSample& packets, const GlobalSample& flows,
                                     const FsdOptions& options = {});

// EM core, exposed for testing: observed[t] = number of flows with t sampled
// packets (t >= 1), thinning rate p in (0, 1].
SizeHistogram invert_thinned_histogram(const std::map<std::uint64_t, std::uint64_t>& observed,
                                       double p, const FsdOptions& options = {});

}  // namespace netsample
