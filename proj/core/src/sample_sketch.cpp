#include "netsample/sample_sketch.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "netsample/error.hpp"

namespace netsample {

namespace {

constexpr std::uint8_t kMagic[4] = {'A', 'R', 'M', 'S'};
constexpr std::uint8_t kVersion = 2;
constexpr std::size_t kTrailerSize = 8;  // checksum over everything before it
constexpr std::uint64_t kChecksumSeed = 0x41524d53;
constexpr std::size_t kHeaderSize = 16;
constexpr std::size_t kRecordSize = 4 + 1 + IdBytes::kCapacity;

void put_le32(std::uint8_t* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
void put_le64(std::uint8_t* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
std::uint32_t get_le32(const std::uint8_t* in) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | in[i];
  return v;
}
std::uint64_t get_le64(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | in[i];
  return v;
}

}  // namespace

std::string_view mode_name(SampleMode mode) {
  return mode == SampleMode::kPacket ? "packet" : "flow";
}

std::uint64_t SampleEntry::fid(SampleMode mode) const {
  return mode == SampleMode::kPacket ? get_be64(id.bytes.data() + 8)
                                     : get_be64(id.bytes.data());
}

std::uint64_t SampleEntry::pid() const { return get_be64(id.bytes.data()); }

SampleSketch::SampleSketch(SampleMode mode, unsigned m, std::uint64_t seed)
    : mode_(mode), hashes_(seed, m) {
  words_.assign(hashes_.slot_count(), kEmptyWord);
  ids_.resize(hashes_.slot_count());
}

void SampleSketch::offer(std::uint32_t slot, std::uint32_t word, const IdBytes& id) {
  std::uint32_t& current = words_[slot];
  if (word < current) {
    if (current == kEmptyWord) ++filled_;
    current = word;
    ids_[slot] = id;
  }
}

void SampleSketch::add(const PacketRecord& p) {
  if (mode_ == SampleMode::kPacket) {
    const IdBytes key = packet_id_bytes(p.pid);
    const Rank r = hashes_.rank_of(key.view());
    offer(hashes_.slot_of(key.view()), static_cast<std::uint32_t>(r.value - 1),
          packet_entry_bytes(p.pid, p.fid));
  } else {
    const IdBytes key = flow_id_bytes(p.fid);
    const Rank r = hashes_.rank_of(key.view());
    offer(hashes_.slot_of(key.view()), static_cast<std::uint32_t>(r.value - 1), key);
  }
}

Rank SampleSketch::rank_at(std::uint32_t slot) const {
  const std::uint32_t w = words_[slot];
  return w == kEmptyWord ? Rank{} : Rank{std::uint64_t{w} + 1};
}

double SampleSketch::rank_sum() const {
  // At most 2^30 slots of at most 2^32 each: the integer sum fits in 64 bits
  // and stays exact.
  std::uint64_t total = 0;
  for (std::uint32_t w : words_) total += std::uint64_t{w} + 1;
  return static_cast<double>(total) / 4294967296.0;
}

std::vector<SampleEntry> SampleSketch::sample_ids() const {
  std::vector<SampleEntry> out;
  out.reserve(filled_);
  for (std::uint32_t j = 0; j < words_.size(); ++j) {
    if (words_[j] != kEmptyWord) out.push_back({j, rank_at(j), ids_[j]});
  }
  return out;
}

bool SampleSketch::compatible_with(const SampleSketch& other) const {
  return mode_ == other.mode_ && hashes_ == other.hashes_;
}

void SampleSketch::merge_from(const SampleSketch& other) {
  if (!compatible_with(other)) {
    throw_mismatch("cannot merge sketches with different (mode, m, seed)");
  }
  for (std::uint32_t j = 0; j < words_.size(); ++j) {
    offer(j, other.words_[j], other.ids_[j]);
  }
}

std::vector<std::uint8_t> SampleSketch::serialize() const {
  std::vector<std::uint8_t> out(kHeaderSize + words_.size() * kRecordSize + kTrailerSize, 0);
  std::memcpy(out.data(), kMagic, 4);
  out[4] = kVersion;
  out[5] = static_cast<std::uint8_t>(mode_);
  out[6] = static_cast<std::uint8_t>(bits());
  out[7] = 0;
  put_le64(out.data() + 8, seed());
  std::uint8_t* rec = out.data() + kHeaderSize;
  for (std::size_t j = 0; j < words_.size(); ++j, rec += kRecordSize) {
    put_le32(rec, words_[j]);
    rec[4] = ids_[j].len;
    std::memcpy(rec + 5, ids_[j].bytes.data(), IdBytes::kCapacity);
  }
  put_le64(rec, hash_bytes(kChecksumSeed, {out.data(), out.size() - kTrailerSize}));
  return out;
}

SampleSketch SampleSketch::deserialize(std::span<const std::uint8_t> data) {
  if (data.size() < kHeaderSize) throw_format("sketch blob truncated in header");
  if (std::memcmp(data.data(), kMagic, 4) != 0) throw_format("bad sketch magic");
  if (data[4] != kVersion) {
    throw_format("unsupported sketch version " + std::to_string(data[4]));
  }
  if (data[5] > 1) throw_format("unknown sampling mode " + std::to_string(data[5]));
  const unsigned m = data[6];
  if (m < HashPair::kMinBits || m > HashPair::kMaxBits) {
    throw_format("slot bit-width " + std::to_string(m) + " out of range");
  }
  const std::size_t slots = std::size_t{1} << m;
  if (data.size() != kHeaderSize + slots * kRecordSize + kTrailerSize) {
    throw_format("sketch blob length does not match 2^m records");
  }
  if (get_le64(data.data() + data.size() - kTrailerSize) !=
      hash_bytes(kChecksumSeed, data.first(data.size() - kTrailerSize))) {
    throw_format("sketch checksum mismatch");
  }

  SampleSketch sk(static_cast<SampleMode>(data[5]), m, get_le64(data.data() + 8));
  const std::uint8_t* rec = data.data() + kHeaderSize;
  for (std::uint32_t j = 0; j < slots; ++j, rec += kRecordSize) {
    const std::uint32_t word = get_le32(rec);
    const std::uint8_t len = rec[4];
    if (len > IdBytes::kCapacity) throw_format("slot id length exceeds 16 bytes");
    IdBytes id;
    id.len = len;
    std::memcpy(id.bytes.data(), rec + 5, IdBytes::kCapacity);
    if (std::any_of(id.bytes.begin() + len, id.bytes.end(), [](auto b) { return b != 0; })) {
      throw_format("nonzero padding in slot id");
    }
    if ((word == kEmptyWord) != (len == 0)) {
      throw_format("slot " + std::to_string(j) + " has inconsistent empty marker");
    }
    if (word == kEmptyWord) continue;

    const std::size_t want = sk.mode_ == SampleMode::kPacket ? 16 : 8;
    if (len != want) throw_format("slot id length does not match sampling mode");
    const IdBytes key = sk.mode_ == SampleMode::kPacket
                            ? packet_id_bytes(get_be64(id.bytes.data()))
                            : id;
    if (sk.hashes_.slot_of(key.view()) != j ||
        sk.hashes_.rank_of(key.view()).value != std::uint64_t{word} + 1) {
      throw_format("slot " + std::to_string(j) + " content does not match its hashes");
    }
    sk.words_[j] = word;
    sk.ids_[j] = id;
    ++sk.filled_;
  }
  return sk;
}

SampleSketch new_sketch(SampleMode mode, unsigned m, std::uint64_t seed) {
  return SampleSketch(mode, m, seed);
}

SampleSketch merge(const SampleSketch& a, const SampleSketch& b) {
  SampleSketch out = a;
  out.merge_from(b);
  return out;
}

}  // namespace netsample
