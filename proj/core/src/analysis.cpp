#include "netsample/analysis.hpp"

#include <cmath>
#include <string>

#include "netsample/error.hpp"
#include "netsample/hashing.hpp"

namespace netsample {

namespace {

void check_eps_delta(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw_invalid("epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw_invalid("delta must lie in (0, 1), got " + std::to_string(delta));
  }
}

}  // namespace

std::uint64_t required_sample_size(double epsilon, double delta) {
  check_eps_delta(epsilon, delta);
  return static_cast<std::uint64_t>(
      std::ceil(3.0 / (epsilon * epsilon) * std::log2(4.0 / delta)));
}

std::uint64_t uniform_sample_size(double epsilon, double delta) {
  check_eps_delta(epsilon, delta);
  return static_cast<std::uint64_t>(
      std::ceil(3.0 / (epsilon * epsilon) * std::log2(2.0 / delta)));
}

double convergence_factor(std::uint64_t m, double alpha, double delta) {
  if (!(alpha > 1.0)) throw_invalid("convergence factor needs alpha > 1");
  if (m == 0) throw_invalid("sample size must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw_invalid("delta must lie in (0, 1)");
  const double la = std::log(alpha);
  return 1.0 + 1.0 / la + std::log(2.0 / delta) / (static_cast<double>(m) * la);
}

std::uint64_t convergence_bound(std::uint64_t m, double alpha, double delta) {
  if (m == 0) throw_invalid("sample size must be positive");
  if (!(alpha >= 1.0)) throw_invalid("alpha must be >= 1, got " + std::to_string(alpha));
  if (!(delta > 0.0 && delta < 1.0)) throw_invalid("delta must lie in (0, 1)");
  const double md = static_cast<double>(m);
  if (alpha == 1.0) return static_cast<std::uint64_t>(std::ceil(md * std::log(2.0 * md / delta)));
  return static_cast<std::uint64_t>(std::ceil(convergence_factor(m, alpha, delta) * md));
}

unsigned slot_bits_for(std::uint64_t m, double alpha) {
  if (!(alpha >= 1.0)) throw_invalid("alpha must be >= 1");
  const double want = alpha * static_cast<double>(m);
  unsigned bits = HashPair::kMinBits;
  while (bits <= HashPair::kMaxBits && static_cast<double>(std::uint64_t{1} << bits) < want) ++bits;
  if (bits > HashPair::kMaxBits) throw_invalid("alpha * M exceeds 2^30 slots");
  return bits;
}

AnalysisParams AnalysisParams::from(double epsilon, double delta, double alpha) {
  AnalysisParams p;
  p.epsilon = epsilon;
  p.delta = delta;
  p.alpha = alpha;
  p.sample_size = required_sample_size(epsilon, delta);
  if (!(alpha >= 1.0)) throw_invalid("alpha must be >= 1");
  p.beta = alpha > 1.0 ? convergence_factor(p.sample_size, alpha, delta) : 0.0;
  return p;
}

}  // namespace netsample
