#include "netsample/cm_distinct.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "netsample/error.hpp"
#include "netsample/hashing.hpp"

namespace netsample {

namespace {

__extension__ typedef unsigned __int128 u128;

constexpr std::uint8_t kMagic[4] = {'A', 'C', 'M', 'D'};
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kHeaderSize = 40;
constexpr std::uint64_t kCellDomain = 0x2545f4914f6cdd1dULL;

void put_le64(std::uint8_t* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
std::uint64_t get_le64(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | in[i];
  return v;
}

}  // namespace

CmDistinctParams CmDistinctParams::from(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw_invalid("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw_invalid("delta must lie in (0, 1)");
  CmDistinctParams p;
  p.epsilon = epsilon;
  p.delta = delta;
  p.eps_a = epsilon / 8.0;
  p.width = static_cast<std::size_t>(std::ceil(4.0 / epsilon - 1e-12));
  p.depth = static_cast<std::size_t>(std::ceil(1.0 + std::log2(1.0 / delta) - 1e-12));
  p.delta_a = delta / (2.0 * static_cast<double>(p.depth));
  p.register_bits = CountDistinctSketch::bits_for_error(p.eps_a);
  return p;
}

CmDistinct::CmDistinct(const CmDistinctParams& params, std::uint64_t seed)
    : params_(params), seed_(seed) {
  if (params.width == 0 || params.depth == 0) throw_invalid("empty Count-Min grid");
  // Row hash parameters come from a splitmix-style sequence off the shared seed
  // so every router derives the same functions.
  std::uint64_t state = seed;
  auto next = [&state] {
    state += 0x9e3779b97f4a7c15ULL;
    return mix64(state);
  };
  rows_.reserve(params.depth);
  for (std::size_t r = 0; r < params.depth; ++r) rows_.push_back({next(), next(), next(), next()});
  cells_.assign(params.depth * params.width,
                CountDistinctSketch(params.register_bits, mix64(seed ^ kCellDomain)));
}

std::size_t CmDistinct::column(std::size_t row, std::uint64_t key) const {
  const RowHash& h = rows_[row];
  const u128 a = (u128{h.a_hi} << 64) | h.a_lo;
  const u128 b = (u128{h.b_hi} << 64) | h.b_lo;
  const auto top = static_cast<std::uint64_t>((a * key + b) >> 64);
  return static_cast<std::size_t>((u128{top} * params_.width) >> 64);
}

void CmDistinct::add(std::uint64_t fid, std::uint64_t pid) {
  const IdBytes serial = packet_entry_bytes(pid, fid);
  add_keyed(fid, serial.view());
}

void CmDistinct::add_keyed(std::uint64_t key, std::span<const std::uint8_t> serial) {
  // The same element hash feeds every row, so hash once.
  const std::uint64_t h = hash_bytes(cells_.front().seed(), serial);
  for (std::size_t r = 0; r < params_.depth; ++r) {
    cells_[r * params_.width + column(r, key)].add_hash(h);
  }
}

double CmDistinct::row_estimate(std::size_t row, std::uint64_t key) const {
  return cells_[row * params_.width + column(row, key)].query();
}

double CmDistinct::query(std::uint64_t key) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < params_.depth; ++r) best = std::min(best, row_estimate(r, key));
  return (1.0 + 2.0 * params_.eps_a) * best;
}

void CmDistinct::merge_from(const CmDistinct& other) {
  if (!(params_ == other.params_) || seed_ != other.seed_) {
    throw_mismatch("cannot merge Count-Min distinct grids with different parameters or seed");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i].merge_from(other.cells_[i]);
}

std::vector<std::uint8_t> CmDistinct::serialize() const {
  const std::size_t regs = std::size_t{1} << params_.register_bits;
  std::vector<std::uint8_t> out(kHeaderSize + cells_.size() * regs, 0);
  std::memcpy(out.data(), kMagic, 4);
  out[4] = kVersion;
  out[5] = static_cast<std::uint8_t>(params_.register_bits);
  put_le64(out.data() + 8, std::bit_cast<std::uint64_t>(params_.epsilon));
  put_le64(out.data() + 16, std::bit_cast<std::uint64_t>(params_.delta));
  put_le64(out.data() + 24, seed_);
  put_le64(out.data() + 32, cells_.size());
  std::uint8_t* dst = out.data() + kHeaderSize;
  for (const auto& c : cells_) {
    std::memcpy(dst, c.registers().data(), regs);
    dst += regs;
  }
  return out;
}

CmDistinct CmDistinct::deserialize(std::span<const std::uint8_t> data) {
  if (data.size() < kHeaderSize) throw_format("Count-Min distinct blob truncated");
  if (std::memcmp(data.data(), kMagic, 4) != 0) throw_format("bad Count-Min distinct magic");
  if (data[4] != kVersion) throw_format("unsupported Count-Min distinct version");
  const double eps = std::bit_cast<double>(get_le64(data.data() + 8));
  const double delta = std::bit_cast<double>(get_le64(data.data() + 16));
  CmDistinct c(CmDistinctParams::from(eps, delta), get_le64(data.data() + 24));
  if (data[5] != c.params_.register_bits || get_le64(data.data() + 32) != c.cells_.size()) {
    throw_format("Count-Min distinct header inconsistent with its parameters");
  }
  const std::size_t regs = std::size_t{1} << c.params_.register_bits;
  if (data.size() != kHeaderSize + c.cells_.size() * regs) {
    throw_format("Count-Min distinct blob length mismatch");
  }
  // Each cell goes through the count-distinct decoder for range checks.
  std::vector<std::uint8_t> cell_blob(16 + regs);
  const auto proto = c.cells_.front().serialize();
  std::memcpy(cell_blob.data(), proto.data(), 16);
  for (std::size_t i = 0; i < c.cells_.size(); ++i) {
    std::memcpy(cell_blob.data() + 16, data.data() + kHeaderSize + i * regs, regs);
    c.cells_[i] = CountDistinctSketch::deserialize(cell_blob);
  }
  return c;
}

void cmd_add(CmDistinct& c, std::uint64_t fid, std::uint64_t pid) { c.add(fid, pid); }

CmDistinct cmd_merge(std::span<const CmDistinct> routers) {
  if (routers.empty()) throw_invalid("cmd_merge needs at least one instance");
  CmDistinct acc = routers.front();
  for (std::size_t i = 1; i < routers.size(); ++i) acc.merge_from(routers[i]);
  return acc;
}

FrozenCmDistinct::FrozenCmDistinct(const CmDistinct& grid) : grid_(&grid) {
  const auto& p = grid.params();
  estimates_.reserve(p.depth * p.width);
  for (std::size_t r = 0; r < p.depth; ++r) {
    for (std::size_t c = 0; c < p.width; ++c) estimates_.push_back(grid.cell(r, c).query());
  }
}

double FrozenCmDistinct::query(std::uint64_t key) const {
  const auto& p = grid_->params();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < p.depth; ++r) {
    best = std::min(best, estimates_[r * p.width + grid_->column(r, key)]);
  }
  return (1.0 + 2.0 * p.eps_a) * best;
}

double cmd_query(const CmDistinct& c, std::uint64_t fid) { return c.query(fid); }

}  // namespace netsample
