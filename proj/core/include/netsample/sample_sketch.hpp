#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "netsample/hashing.hpp"

namespace netsample {

// One stream element. Flow ids use the pair encoding src<<32 | dst.
struct PacketRecord {
  std::uint64_t fid = 0;
  std::uint64_t pid = 0;

  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

inline std::uint32_t source_address(std::uint64_t fid) {
  return static_cast<std::uint32_t>(fid >> 32);
}
inline std::uint32_t destination_address(std::uint64_t fid) {
  return static_cast<std::uint32_t>(fid & 0xffffffffULL);
}
inline std::uint64_t make_flow_id(std::uint32_t src, std::uint32_t dst) {
  return (std::uint64_t{src} << 32) | dst;
}

enum class SampleMode : std::uint8_t { kPacket = 0, kFlow = 1 };

std::string_view mode_name(SampleMode mode);

struct SampleEntry {
  std::uint32_t slot = 0;
  Rank rank;
  IdBytes id;

  // Packet mode stores pid||fid; flow mode stores fid only.
  std::uint64_t fid(SampleMode mode) const;
  std::uint64_t pid() const;

  friend bool operator==(const SampleEntry&, const SampleEntry&) = default;
};

// Per-switch min-rank sampler over 2^m slots. Each slot keeps the identifier
// with the smallest rank among those hashed to it, so the final state is a
// function of the identifier set alone and two sketches merge slot-wise.
class SampleSketch {
 public:
  static constexpr std::uint32_t kEmptyWord = 0xffffffffU;

  SampleSketch(SampleMode mode, unsigned m, std::uint64_t seed);

  SampleMode mode() const { return mode_; }
  unsigned bits() const { return hashes_.bits(); }
  std::uint64_t seed() const { return hashes_.seed(); }
  std::uint64_t slot_count() const { return hashes_.slot_count(); }
  const HashPair& hashes() const { return hashes_; }

  void add(const PacketRecord& p);

  // Number of occupied slots (the achieved sample size).
  std::uint64_t filled_count() const { return filled_; }

  Rank rank_at(std::uint32_t slot) const;
  const IdBytes& id_at(std::uint32_t slot) const { return ids_[slot]; }

  // Sum of slot ranks with empty slots counted as 1.0.
  double rank_sum() const;

  std::vector<SampleEntry> sample_ids() const;

  bool compatible_with(const SampleSketch& other) const;

  // Slot-wise minimum; on an exact rank tie the slot of *this is kept.
  void merge_from(const SampleSketch& other);

  std::vector<std::uint8_t> serialize() const;
  static SampleSketch deserialize(std::span<const std::uint8_t> data);

  friend bool operator==(const SampleSketch& a, const SampleSketch& b) {
    return a.mode_ == b.mode_ && a.hashes_ == b.hashes_ && a.words_ == b.words_ &&
           a.ids_ == b.ids_;
  }

 private:
  void offer(std::uint32_t slot, std::uint32_t word, const IdBytes& id);

  SampleMode mode_;
  HashPair hashes_;
  // rank - 1 for occupied slots, kEmptyWord otherwise; unsigned order matches
  // rank order with empty sorting last.
  std::vector<std::uint32_t> words_;
  std::vector<IdBytes> ids_;
  std::uint64_t filled_ = 0;
};

SampleSketch new_sketch(SampleMode mode, unsigned m, std::uint64_t seed);
SampleSketch merge(const SampleSketch& a, const SampleSketch& b);

}  // namespace netsample
