#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "netsample/cm_distinct.hpp"

namespace netsample {

struct HierHhParams {
  double epsilon = 0.2;
  double delta = 0.25;
  unsigned universe_bits = 8;  // u = log2 |U|
  double psi = 0.0;            // eps^-1 * u * log2(1/delta)
  double level_epsilon = 0.0;  // eps / 2
  double level_delta = 0.0;    // 1 / psi
  std::size_t top_size = 0;    // ceil(1 / level_epsilon)

  static HierHhParams from(double epsilon, double delta, unsigned universe_bits);

  friend bool operator==(const HierHhParams&, const HierHhParams&) = default;
};

struct HhQueryResult {
  std::vector<std::uint64_t> flows;
  double threshold = 0.0;
  // Set when the reporting threshold was not positive and every candidate
  // was reported.
  bool threshold_clamped = false;
};

// Prefix hierarchy of Count-Min distinct grids, one per level q = 0..u. Level
// q sees each packet's flow id with its q low bits cleared.
class HierHh {
 public:
  HierHh(const HierHhParams& params, std::uint64_t seed);
  HierHh(double epsilon, double delta, unsigned universe_bits, std::uint64_t seed)
      : HierHh(HierHhParams::from(epsilon, delta, universe_bits), seed) {}

  const HierHhParams& params() const { return params_; }
  const CmDistinct& level(unsigned q) const { return levels_[q]; }

  void add(std::uint64_t fid, std::uint64_t pid);
  void merge_from(const HierHh& other);

  // Descend the prefix tree from the root, keeping the top_size prefixes per
  // level, and store candidate frequencies for the survivors at level 0.
  void finalize();
  bool finalized() const { return v_hat_.has_value(); }

  double v_hat() const;
  const std::vector<std::uint64_t>& top(unsigned q) const;
  const std::map<std::uint64_t, double>& candidates() const;

  HhQueryResult query(double theta) const;
  double freq_est(std::uint64_t fid) const;

  std::vector<std::uint8_t> serialize() const;
  static HierHh deserialize(std::span<const std::uint8_t> data);

  friend bool operator==(const HierHh& a, const HierHh& b) {
    return a.params_ == b.params_ && a.seed_ == b.seed_ && a.levels_ == b.levels_;
  }

 private:
  void require_finalized() const;

  HierHhParams params_;
  std::uint64_t seed_;
  std::vector<CmDistinct> levels_;
  std::optional<double> v_hat_;
  std::vector<std::vector<std::uint64_t>> top_;
  std::map<std::uint64_t, double> candidates_;
};

// V (theta / (1 + e) - e (1 + e)) with e the per-level accuracy.
double hhh_report_threshold(double v_hat, double theta, double eps_a);

// x AND 1^(u-q) 0^q
std::uint64_t level_prefix(std::uint64_t fid, unsigned q, unsigned universe_bits);

// Both one-bit extensions {p, p | 1<<q} of each level-(q+1) prefix.
std::vector<std::uint64_t> hhh_descendants(std::span<const std::uint64_t> parents, unsigned q);

void hhh_add(HierHh& h, std::uint64_t fid, std::uint64_t pid);
HierHh hhh_merge(std::span<const HierHh> routers);
HhQueryResult hhh_query(const HierHh& h, double theta);
double hhh_freq_est(const HierHh& h, std::uint64_t fid);

}  // namespace netsample
