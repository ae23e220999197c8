#include "netsample/hop_count.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "netsample/error.hpp"

namespace netsample {

std::vector<double> reciprocal_gamma_coeffs(std::size_t count) {
  if (count > 30) throw_invalid("at most 30 reciprocal-gamma coefficients are supported");
  // 1/Gamma(z) = z / Gamma(1+z) = z exp(A(z)) with
  // A(z) = gamma z + sum_{k>=2} (-1)^(k+1) zeta(k) z^k / k.
  std::vector<double> a(count + 1, 0.0);
  if (count >= 1) a[1] = std::numbers::egamma;
  for (std::size_t k = 2; k <= count; ++k) {
    const double sign = (k % 2 == 0) ? -1.0 : 1.0;
    a[k] = sign * std::riemann_zeta(static_cast<double>(k)) / static_cast<double>(k);
  }
  // E = exp(A): E_0 = 1, n E_n = sum_{j=1..n} j A_j E_{n-j}.
  std::vector<double> e(count + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t n = 1; n <= count; ++n) {
    double s = 0.0;
    for (std::size_t j = 1; j <= n; ++j) s += static_cast<double>(j) * a[j] * e[n - j];
    e[n] = s / static_cast<double>(n);
  }
  std::vector<double> c(count + 1, 0.0);
  for (std::size_t k = 1; k <= count; ++k) c[k] = e[k - 1];
  return c;
}

std::vector<double> hop_count_distribution(double n_nodes, std::size_t k_max) {
  if (!(n_nodes >= 2.0)) throw_invalid("hop-count model needs N >= 2");
  if (k_max > 30) throw_invalid("hop-count support is limited to k <= 30");
  const auto coeff = reciprocal_gamma_coeffs(30);
  const double ln_n = std::log(n_nodes);
  std::vector<double> pmf(k_max + 1, 0.0);
  for (std::size_t k = 0; k <= k_max; ++k) {
    double s = 0.0;
    for (std::size_t m = 0; m <= k; ++m) {
      const double j = static_cast<double>(k - m);
      s += coeff[m] * std::exp(j * std::log(ln_n) - std::lgamma(j + 1.0));
    }
    pmf[k] = std::max(0.0, s / n_nodes);
  }
  double total = 0.0;
  for (double p : pmf) total += p;
  if (!(total > 0.0)) throw_invalid("hop-count distribution has no mass below k_max");
  for (double& p : pmf) p /= total;
  return pmf;
}

std::size_t distribution_median(const std::vector<double>& pmf) {
  double cum = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    cum += pmf[k];
    if (cum >= 0.5) return k;
  }
  return pmf.empty() ? 0 : pmf.size() - 1;
}

double clamped_mean_hops(const std::vector<double>& pmf, std::size_t switches) {
  if (switches < 1) throw_invalid("need at least one switch");
  double mean = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    mean += pmf[k] * static_cast<double>(std::clamp<std::size_t>(k, 1, switches));
  }
  return mean;
}

}  // namespace netsample
