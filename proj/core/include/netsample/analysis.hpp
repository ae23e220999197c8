#pragma once

#include <cstdint>

namespace netsample {

// Sample-size and convergence bounds for the slot sampler.
struct AnalysisParams {
  double epsilon = 0.01;
  double delta = 0.01;
  double alpha = 2.0;
  std::uint64_t sample_size = 0;  // M
  double beta = 0.0;              // 0 when alpha == 1

  static AnalysisParams from(double epsilon, double delta, double alpha);
};

// M = ceil(3 eps^-2 log2(4/delta)).
std::uint64_t required_sample_size(double epsilon, double delta);

// Size for a single uniform sample: ceil(3 eps^-2 log2(2/delta)).
std::uint64_t uniform_sample_size(double epsilon, double delta);

// beta = 1 + 1/ln(alpha) + ln(2/delta) / (M ln(alpha)), alpha > 1.
double convergence_factor(std::uint64_t m, double alpha, double delta);

// Packets needed before the sampler holds M entries: ceil(M ln(2M/delta)) for
// alpha == 1, ceil(beta M) otherwise.
std::uint64_t convergence_bound(std::uint64_t m, double alpha, double delta);

// Smallest slot bit-width with 2^bits >= alpha * M.
unsigned slot_bits_for(std::uint64_t m, double alpha);

}  // namespace netsample
