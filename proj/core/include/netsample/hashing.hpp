#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>

namespace netsample {

// Fixed-width identifier storage. Flow ids are 8 big-endian bytes; packet-mode
// entries carry pid||fid (16 bytes). Unused tail bytes are always zero so that
// byte-wise equality is value equality.
struct IdBytes {
  static constexpr std::size_t kCapacity = 16;

  std::array<std::uint8_t, kCapacity> bytes{};
  std::uint8_t len = 0;

  std::span<const std::uint8_t> view() const { return {bytes.data(), len}; }
  bool empty() const { return len == 0; }

  friend bool operator==(const IdBytes&, const IdBytes&) = default;
  friend auto operator<=>(const IdBytes&, const IdBytes&) = default;
};

void put_be64(std::uint8_t* out, std::uint64_t v);
std::uint64_t get_be64(const std::uint8_t* in);

IdBytes flow_id_bytes(std::uint64_t fid);
IdBytes packet_id_bytes(std::uint64_t pid);
IdBytes packet_entry_bytes(std::uint64_t pid, std::uint64_t fid);

// 64-bit seeded hash over a byte string. Output depends only on (seed, bytes)
// and is identical on every platform.
std::uint64_t hash_bytes(std::uint64_t seed, std::span<const std::uint8_t> data);
std::uint64_t mix64(std::uint64_t x);

// Sampling rank in (0, 1] as a 32-bit fixed-point numerator over 2^32.
// Occupied slots hold values in [1, 2^32 - 1]; kEmpty (2^32) encodes 1.0.
struct Rank {
  static constexpr std::uint64_t kEmpty = std::uint64_t{1} << 32;

  std::uint64_t value = kEmpty;

  bool is_empty() const { return value == kEmpty; }
  double as_double() const { return static_cast<double>(value) / 4294967296.0; }

  friend bool operator==(Rank, Rank) = default;
  friend auto operator<=>(Rank, Rank) = default;
};

class HashPair {
 public:
  static constexpr unsigned kMinBits = 1;
  static constexpr unsigned kMaxBits = 30;

  HashPair(std::uint64_t seed, unsigned m);

  std::uint64_t seed() const { return seed_; }
  unsigned bits() const { return m_; }
  std::uint64_t slot_count() const { return std::uint64_t{1} << m_; }

  std::uint32_t slot_of(std::span<const std::uint8_t> id) const;
  Rank rank_of(std::span<const std::uint8_t> id) const;

  friend bool operator==(const HashPair& a, const HashPair& b) {
    return a.seed_ == b.seed_ && a.m_ == b.m_;
  }

 private:
  std::uint64_t seed_;
  unsigned m_;
  std::uint64_t slot_seed_;
  std::uint64_t rank_seed_;
};

HashPair new_hash_pair(std::uint64_t seed, unsigned m);

}  // namespace netsample
