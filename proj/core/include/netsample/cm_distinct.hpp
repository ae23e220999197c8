#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "netsample/count_distinct.hpp"

namespace netsample {

struct CmDistinctParams {
  double epsilon = 0.1;
  double delta = 0.25;
  double eps_a = 0.0;    // epsilon / 8
  double delta_a = 0.0;  // delta / (2 d)
  std::size_t width = 0; // ceil(4 / epsilon)
  std::size_t depth = 0; // ceil(1 + log2(1 / delta))
  unsigned register_bits = 0;

  static CmDistinctParams from(double epsilon, double delta);

  friend bool operator==(const CmDistinctParams&, const CmDistinctParams&) = default;
};

// Count-Min layout whose counters are distinct counters over <key, serial>
// pairs, so packets seen by several routers are counted once after merging.
class CmDistinct {
 public:
  CmDistinct(const CmDistinctParams& params, std::uint64_t seed);
  CmDistinct(double epsilon, double delta, std::uint64_t seed)
      : CmDistinct(CmDistinctParams::from(epsilon, delta), seed) {}

  const CmDistinctParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }

  // Column of `key` in row `row`; rows use independent pairwise hashes.
  std::size_t column(std::size_t row, std::uint64_t key) const;

  void add(std::uint64_t fid, std::uint64_t pid);
  // General form: `serial` is the unique element identity fed to the cells.
  void add_keyed(std::uint64_t key, std::span<const std::uint8_t> serial);

  // (1 + 2 eps_a) * min over rows of the cell estimate.
  double query(std::uint64_t key) const;
  double row_estimate(std::size_t row, std::uint64_t key) const;

  const CountDistinctSketch& cell(std::size_t row, std::size_t col) const {
    return cells_[row * params_.width + col];
  }

  void merge_from(const CmDistinct& other);

  std::vector<std::uint8_t> serialize() const;
  static CmDistinct deserialize(std::span<const std::uint8_t> data);

  friend bool operator==(const CmDistinct& a, const CmDistinct& b) {
    return a.params_ == b.params_ && a.seed_ == b.seed_ && a.cells_ == b.cells_;
  }

 private:
  // Multiply-add-shift over 128-bit words, reduced onto [0, width).
  struct RowHash {
    std::uint64_t a_hi, a_lo;
    std::uint64_t b_hi, b_lo;
  };

  CmDistinctParams params_;
  std::uint64_t seed_;
  std::vector<RowHash> rows_;
  std::vector<CountDistinctSketch> cells_;
};

// Read-only view with every cell estimate computed once; query() matches
// CmDistinct::query exactly.
class FrozenCmDistinct {
 public:
  explicit FrozenCmDistinct(const CmDistinct& grid);
  double query(std::uint64_t key) const;

 private:
  const CmDistinct* grid_;
  std::vector<double> estimates_;
};

void cmd_add(CmDistinct& c, std::uint64_t fid, std::uint64_t pid);
CmDistinct cmd_merge(std::span<const CmDistinct> routers);
double cmd_query(const CmDistinct& c, std::uint64_t fid);

}  // namespace netsample
