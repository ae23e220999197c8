#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace netsample {

// Mergeable distinct counter (log-log registers, HyperLogLog estimator with
// linear counting in the small range). Merging is a register-wise maximum, so
// the state depends only on the set of items ever added.
class CountDistinctSketch {
 public:
  static constexpr unsigned kMinBits = 4;
  static constexpr unsigned kMaxBits = 20;

  CountDistinctSketch(unsigned register_bits, std::uint64_t seed);

  // Smallest power-of-two register count with 1.04 / sqrt(m) <= epsilon.
  static unsigned bits_for_error(double epsilon);

  unsigned register_bits() const { return bits_; }
  std::size_t register_count() const { return registers_.size(); }
  std::uint64_t seed() const { return seed_; }
  std::span<const std::uint8_t> registers() const { return registers_; }

  void add(std::span<const std::uint8_t> item);
  void add_hash(std::uint64_t h);
  double query() const;
  bool empty() const;

  void merge_from(const CountDistinctSketch& other);

  std::vector<std::uint8_t> serialize() const;
  static CountDistinctSketch deserialize(std::span<const std::uint8_t> data);

  friend bool operator==(const CountDistinctSketch&, const CountDistinctSketch&) = default;

 private:
  unsigned bits_;
  std::uint64_t seed_;
  std::vector<std::uint8_t> registers_;
};

void cds_add(CountDistinctSketch& s, std::span<const std::uint8_t> item);
double cds_query(const CountDistinctSketch& s);
CountDistinctSketch cds_merge(const CountDistinctSketch& a, const CountDistinctSketch& b);

// Distributed volume estimation: every router feeds its packets' <fid, pid>
// into one counter; the controller merges and queries, counting each packet
// once however many routers saw it.
double volume_estimate(std::span<const CountDistinctSketch> routers);

}  // namespace netsample
