#pragma once

#include <cstddef>
#include <vector>

namespace netsample {

// Taylor coefficients of 1/Gamma(z) = sum_k c_k z^k. Returns c_0..c_count with
// c_0 = 0, c_1 = 1, c_2 = Euler-Mascheroni gamma. count <= 30.
std::vector<double> reciprocal_gamma_coeffs(std::size_t count);

// Internet hop-count model for a graph of N nodes:
//   Pr[k hops] ~ (1/N) sum_{m=0..k} a_m (ln N)^(k-m) / (k-m)!
// where a_m is the coefficient of z^m in 1/Gamma(z). Tail terms that come out
// negative are clamped to zero and the truncated vector over k = 0..k_max is
// renormalised. k_max <= 30.
std::vector<double> hop_count_distribution(double n_nodes, std::size_t k_max);

std::size_t distribution_median(const std::vector<double>& pmf);

// Mean of min(max(k, 1), switches) under the distribution.
double clamped_mean_hops(const std::vector<double>& pmf, std::size_t switches);

}  // namespace netsample
