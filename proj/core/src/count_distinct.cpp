#include "netsample/count_distinct.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "netsample/error.hpp"
#include "netsample/hashing.hpp"

namespace netsample {

namespace {

constexpr std::uint8_t kMagic[4] = {'A', 'C', 'D', 'S'};
constexpr std::uint8_t kVersion = 1;

// 2^-r for every possible register value.
const std::array<double, 65>& inverse_powers() {
  static const std::array<double, 65> table = [] {
    std::array<double, 65> t{};
    for (int r = 0; r <= 64; ++r) t[r] = std::ldexp(1.0, -r);
    return t;
  }();
  return table;
}

double alpha_m(std::size_t m) {
  switch (m) {
    case 16: return 0.673;
    case 32: return 0.697;
    case 64: return 0.709;
    default: return 0.7213 / (1.0 + 1.079 / static_cast<double>(m));
  }
}

}  // namespace

CountDistinctSketch::CountDistinctSketch(unsigned register_bits, std::uint64_t seed)
    : bits_(register_bits), seed_(seed) {
  if (register_bits < kMinBits || register_bits > kMaxBits) {
    throw_invalid("register bits " + std::to_string(register_bits) + " outside [4, 20]");
  }
  registers_.assign(std::size_t{1} << register_bits, 0);
}

unsigned CountDistinctSketch::bits_for_error(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw_invalid("epsilon must lie in (0, 1)");
  unsigned bits = kMinBits;
  while (bits < kMaxBits && 1.04 / std::sqrt(std::ldexp(1.0, static_cast<int>(bits))) > epsilon) ++bits;
  return bits;
}

void CountDistinctSketch::add(std::span<const std::uint8_t> item) {
  add_hash(hash_bytes(seed_, item));
}

void CountDistinctSketch::add_hash(std::uint64_t h) {
  const std::size_t idx = h >> (64 - bits_);
  const std::uint64_t rest = h << bits_;
  const unsigned cap = 64 - bits_ + 1;
  const unsigned rho = rest == 0 ? cap : std::min<unsigned>(std::countl_zero(rest) + 1, cap);
  std::uint8_t& reg = registers_[idx];
  if (rho > reg) reg = static_cast<std::uint8_t>(rho);
}

double CountDistinctSketch::query() const {
  const auto& inv = inverse_powers();
  const double m = static_cast<double>(registers_.size());
  double sum = 0.0;
  std::size_t zeros = 0;
  for (std::uint8_t r : registers_) {
    sum += inv[r];
    zeros += (r == 0);
  }
  const double raw = alpha_m(registers_.size()) * m * m / sum;
  if (raw <= 2.5 * m && zeros > 0) return m * std::log(m / static_cast<double>(zeros));
  return raw;
}

bool CountDistinctSketch::empty() const {
  return std::all_of(registers_.begin(), registers_.end(), [](auto r) { return r == 0; });
}

void CountDistinctSketch::merge_from(const CountDistinctSketch& other) {
  if (bits_ != other.bits_ || seed_ != other.seed_) {
    throw_mismatch("cannot merge count-distinct sketches with different size or seed");
  }
  for (std::size_t i = 0; i < registers_.size(); ++i) {
    registers_[i] = std::max(registers_[i], other.registers_[i]);
  }
}

std::vector<std::uint8_t> CountDistinctSketch::serialize() const {
  std::vector<std::uint8_t> out(16 + registers_.size());
  std::memcpy(out.data(), kMagic, 4);
  out[4] = kVersion;
  out[5] = static_cast<std::uint8_t>(bits_);
  for (int i = 0; i < 8; ++i) out[8 + i] = static_cast<std::uint8_t>(seed_ >> (8 * i));
  std::memcpy(out.data() + 16, registers_.data(), registers_.size());
  return out;
}

CountDistinctSketch CountDistinctSketch::deserialize(std::span<const std::uint8_t> data) {
  if (data.size() < 16) throw_format("count-distinct blob truncated");
  if (std::memcmp(data.data(), kMagic, 4) != 0) throw_format("bad count-distinct magic");
  if (data[4] != kVersion) throw_format("unsupported count-distinct version");
  const unsigned bits = data[5];
  if (bits < kMinBits || bits > kMaxBits) throw_format("count-distinct register bits out of range");
  std::uint64_t seed = 0;
  for (int i = 7; i >= 0; --i) seed = (seed << 8) | data[8 + i];
  CountDistinctSketch s(bits, seed);
  if (data.size() != 16 + s.registers_.size()) throw_format("count-distinct blob length mismatch");
  const unsigned cap = 64 - bits + 1;
  for (std::size_t i = 0; i < s.registers_.size(); ++i) {
    if (data[16 + i] > cap) throw_format("register value out of range");
    s.registers_[i] = data[16 + i];
  }
  return s;
}

void cds_add(CountDistinctSketch& s, std::span<const std::uint8_t> item) { s.add(item); }

double cds_query(const CountDistinctSketch& s) { return s.query(); }

CountDistinctSketch cds_merge(const CountDistinctSketch& a, const CountDistinctSketch& b) {
  CountDistinctSketch out = a;
  out.merge_from(b);
  return out;
}

double volume_estimate(std::span<const CountDistinctSketch> routers) {
  if (routers.empty()) return 0.0;
  CountDistinctSketch acc = routers.front();
  for (std::size_t i = 1; i < routers.size(); ++i) acc.merge_from(routers[i]);
  return acc.query();
}

}  // namespace netsample
