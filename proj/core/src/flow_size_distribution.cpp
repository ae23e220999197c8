#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "netsample/controller.hpp"
#include "netsample/error.hpp"

namespace netsample {

namespace {

// Likelihood windows are cut where the log-pmf falls this far below its peak.
constexpr double kLogCutoff = 30.0;

double log_binom_pmf(std::uint64_t t, std::uint64_t i, double log_p, double log_q) {
  const double td = static_cast<double>(t);
  const double id = static_cast<double>(i);
  return std::lgamma(id + 1.0) - std::lgamma(td + 1.0) - std::lgamma(id - td + 1.0) +
         td * log_p + (id - td) * log_q;
}

struct Window {
  std::uint64_t t;
  double weight;                  // number of flows observed with t samples
  std::uint64_t first;            // smallest true size in the window
  std::vector<double> likelihood; // Pr[t | size = first + k]
};

Window build_window(std::uint64_t t, double weight, double p) {
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  // Likelihood in the true size i peaks near t / p.
  const auto peak = std::max<std::uint64_t>(t, static_cast<std::uint64_t>(std::floor(t / p)));
  const double top = log_binom_pmf(t, peak, log_p, log_q);
  std::uint64_t lo = peak;
  while (lo > t && log_binom_pmf(t, lo - 1, log_p, log_q) > top - kLogCutoff) --lo;
  std::uint64_t hi = peak;
  while (log_binom_pmf(t, hi + 1, log_p, log_q) > top - kLogCutoff) ++hi;

  Window w{t, weight, lo, {}};
  w.likelihood.reserve(hi - lo + 1);
  for (std::uint64_t i = lo; i <= hi; ++i) {
    w.likelihood.push_back(std::exp(log_binom_pmf(t, i, log_p, log_q) - top));
  }
  return w;
}

}  // namespace

SizeHistogram invert_thinned_histogram(const std::map<std::uint64_t, std::uint64_t>& observed,
                                       double p, const FsdOptions& options) {
  if (!(p > 0.0 && p <= 1.0)) throw_invalid("thinning rate must lie in (0, 1]");
  SizeHistogram out;
  if (observed.empty()) return out;
  if (observed.begin()->first == 0) throw_invalid("observed histogram must start at t >= 1");
  if (p == 1.0) {
    for (const auto& [t, n] : observed) out[t] = static_cast<double>(n);
    return out;
  }

  std::vector<Window> windows;
  windows.reserve(observed.size());
  std::uint64_t max_size = 0;
  for (const auto& [t, n] : observed) {
    windows.push_back(build_window(t, static_cast<double>(n), p));
    max_size = std::max<std::uint64_t>(max_size, windows.back().first + windows.back().likelihood.size() - 1);
  }

  // Sizes 1..max_size; phi is the size distribution, est the flow counts.
  const std::size_t n_sizes = max_size;
  std::vector<double> seen_prob(n_sizes);
  for (std::size_t k = 0; k < n_sizes; ++k) {
    seen_prob[k] = -std::expm1(static_cast<double>(k + 1) * std::log1p(-p));
  }
  std::vector<double> phi(n_sizes, 0.0);
  for (const auto& w : windows) {
    for (std::size_t k = 0; k < w.likelihood.size(); ++k) phi[w.first - 1 + k] = 1.0;
  }
  {
    const double s = std::accumulate(phi.begin(), phi.end(), 0.0);
    for (double& v : phi) v /= s;
  }

  std::vector<double> est(n_sizes, 0.0);
  for (unsigned iter = 0; iter < options.max_iterations; ++iter) {
    std::fill(est.begin(), est.end(), 0.0);
    for (const auto& w : windows) {
      double norm = 0.0;
      for (std::size_t k = 0; k < w.likelihood.size(); ++k) norm += phi[w.first - 1 + k] * w.likelihood[k];
      if (norm <= 0.0) continue;
      const double scale = w.weight / norm;
      for (std::size_t k = 0; k < w.likelihood.size(); ++k) {
        est[w.first - 1 + k] += scale * phi[w.first - 1 + k] * w.likelihood[k];
      }
    }
    // Observed flows of size i stand for 1 / Pr[seen | i] flows overall.
    for (std::size_t k = 0; k < n_sizes; ++k) est[k] /= seen_prob[k];
    const double total = std::accumulate(est.begin(), est.end(), 0.0);
    double change = 0.0;
    for (std::size_t k = 0; k < n_sizes; ++k) {
      const double next = est[k] / total;
      change = std::max(change, std::abs(next - phi[k]));
      phi[k] = next;
    }
    if (change < options.tolerance) break;
  }

  for (std::size_t k = 0; k < n_sizes; ++k) {
    if (est[k] > 1e-9) out[k + 1] = est[k];
  }
  return out;
}

SizeHistogram flow_size_distribution(const GlobalSample& packets, const GlobalSample& flows,
                                     const FsdOptions& options) {
  if (packets.mode() != SampleMode::kPacket || flows.mode() != SampleMode::kFlow) {
    throw_invalid("flow_size_distribution needs a packet sample and a flow sample");
  }
  if (packets.m_tilde() == 0) return {};

  std::map<std::uint64_t, std::uint64_t> observed;
  for (const auto& [fid, t] : packets.flow_counts()) ++observed[t];
  SizeHistogram hist = invert_thinned_histogram(observed, sampling_probability(packets), options);

  if (options.rescale_to_flow_cardinality && flows.v_hat() > 0.0) {
    double total = 0.0;
    for (const auto& [size, count] : hist) total += count;
    if (total > 0.0) {
      const double scale = flows.v_hat() / total;
      for (auto& [size, count] : hist) count *= scale;
    }
  }
  return hist;
}

}  // namespace netsample
