#include "netsample/hashing.hpp"

#include <string>

#include "netsample/error.hpp"

namespace netsample {

namespace {

constexpr std::uint64_t kSlotDomain = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kRankDomain = 0xc2b2ae3d27d4eb4fULL;
constexpr std::uint64_t kMulA = 0x87c37b91114253d5ULL;
constexpr std::uint64_t kMulB = 0x4cf5ad432745937fULL;

std::uint64_t load_le64(const std::uint8_t* p, std::size_t n) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < n; ++i) v |= std::uint64_t{p[i]} << (8 * i);
  return v;
}

std::uint64_t rotl(std::uint64_t x, int r) { return (x << r) | (x >> (64 - r)); }

}  // namespace

std::string_view category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::kInvalidArgument: return "invalid_argument";
    case ErrorCategory::kMismatch: return "mismatch";
    case ErrorCategory::kFormat: return "format";
    case ErrorCategory::kIo: return "io";
  }
  return "unknown";
}

void put_be64(std::uint8_t* out, std::uint64_t v) {
  for (int i = 7; i >= 0; --i) {
    out[i] = static_cast<std::uint8_t>(v & 0xff);
    v >>= 8;
  }
}

std::uint64_t get_be64(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in[i];
  return v;
}

IdBytes flow_id_bytes(std::uint64_t fid) {
  IdBytes id;
  put_be64(id.bytes.data(), fid);
  id.len = 8;
  return id;
}

IdBytes packet_id_bytes(std::uint64_t pid) { return flow_id_bytes(pid); }

IdBytes packet_entry_bytes(std::uint64_t pid, std::uint64_t fid) {
  IdBytes id;
  put_be64(id.bytes.data(), pid);
  put_be64(id.bytes.data() + 8, fid);
  id.len = 16;
  return id;
}

// murmur3 finalizer
std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

std::uint64_t hash_bytes(std::uint64_t seed, std::span<const std::uint8_t> data) {
  std::uint64_t h = mix64(seed ^ (data.size() * kMulA));
  std::size_t i = 0;
  for (; i + 8 <= data.size(); i += 8) {
    h ^= mix64(load_le64(data.data() + i, 8) * kMulB);
    h = rotl(h, 27) * kMulA + 0x52dce729;
  }
  if (i < data.size()) {
    h ^= mix64(load_le64(data.data() + i, data.size() - i) * kMulB ^ kRankDomain);
    h = rotl(h, 31) * kMulA;
  }
  return mix64(h ^ data.size());
}

HashPair::HashPair(std::uint64_t seed, unsigned m)
    : seed_(seed),
      m_(m),
      slot_seed_(mix64(seed ^ kSlotDomain)),
      rank_seed_(mix64(seed ^ kRankDomain) + kSlotDomain) {
  if (m < kMinBits || m > kMaxBits) {
    throw_invalid("slot bit-width m=" + std::to_string(m) + " outside [1, 30]");
  }
}

std::uint32_t HashPair::slot_of(std::span<const std::uint8_t> id) const {
  return static_cast<std::uint32_t>(hash_bytes(slot_seed_, id) >> (64 - m_));
}

Rank HashPair::rank_of(std::span<const std::uint8_t> id) const {
  // Map the top 32 hash bits onto [1, 2^32 - 1] so no rank collides with the
  // empty sentinel and none decodes to zero.
  const std::uint64_t top = hash_bytes(rank_seed_, id) >> 32;
  return Rank{1 + ((top * 0xffffffffULL) >> 32)};
}

HashPair new_hash_pair(std::uint64_t seed, unsigned m) { return HashPair(seed, m); }

}  // namespace netsample
