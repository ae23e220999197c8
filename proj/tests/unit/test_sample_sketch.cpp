#include <gtest/gtest.h>

#include <map>
#include <random>
#include <vector>

#include "netsample/error.hpp"
#include "netsample/hashing.hpp"
#include "netsample/sample_sketch.hpp"

using namespace netsample;

namespace {

std::vector<PacketRecord> random_packets(std::size_t n, std::uint64_t seed, std::uint64_t flows) {
  std::mt19937_64 g(seed);
  std::vector<PacketRecord> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({g() % flows, i * 3 + (g() & 1)});
  return out;
}

// Brute-force oracle: the min-rank identifier per slot.
std::map<std::uint32_t, std::pair<std::uint64_t, IdBytes>> oracle(SampleMode mode, unsigned m,
                                                                   std::uint64_t seed,
                                                                   const std::vector<PacketRecord>& ps) {
  HashPair hp(seed, m);
  std::map<std::uint32_t, std::pair<std::uint64_t, IdBytes>> best;
  for (const auto& p : ps) {
    const IdBytes key = mode == SampleMode::kPacket ? packet_id_bytes(p.pid) : flow_id_bytes(p.fid);
    const IdBytes stored = mode == SampleMode::kPacket ? packet_entry_bytes(p.pid, p.fid) : flow_id_bytes(p.fid);
    const auto slot = hp.slot_of(key.view());
    const auto rank = hp.rank_of(key.view()).value;
    auto it = best.find(slot);
    if (it == best.end() || rank < it->second.first) best[slot] = {rank, stored};
  }
  return best;
}

}  // namespace

TEST(SampleSketch, EmptyState) {
  SampleSketch s(SampleMode::kPacket, 8, 1);
  EXPECT_EQ(s.slot_count(), 256U);
  EXPECT_EQ(s.filled_count(), 0U);
  EXPECT_DOUBLE_EQ(s.rank_sum(), 256.0);
  EXPECT_TRUE(s.sample_ids().empty());
  EXPECT_TRUE(s.rank_at(0).is_empty());
}

TEST(SampleSketch, MatchesBruteForceOracle) {
  for (auto mode : {SampleMode::kPacket, SampleMode::kFlow}) {
    const auto ps = random_packets(5000, 11, 700);
    SampleSketch s(mode, 9, 77);
    for (const auto& p : ps) s.add(p);
    const auto want = oracle(mode, 9, 77, ps);
    EXPECT_EQ(s.filled_count(), want.size());
    for (std::uint32_t slot = 0; slot < s.slot_count(); ++slot) {
      auto it = want.find(slot);
      if (it == want.end()) {
        EXPECT_TRUE(s.rank_at(slot).is_empty());
      } else {
        EXPECT_EQ(s.rank_at(slot).value, it->second.first);
        EXPECT_EQ(s.id_at(slot), it->second.second);
      }
    }
  }
}

TEST(SampleSketch, RankSumIsExactSum) {
  const auto ps = random_packets(300, 2, 1000);
  SampleSketch s(SampleMode::kFlow, 10, 5);
  for (const auto& p : ps) s.add(p);
  double manual = 0.0;
  for (std::uint32_t i = 0; i < s.slot_count(); ++i) manual += s.rank_at(i).as_double();
  EXPECT_NEAR(s.rank_sum(), manual, 1e-9);
}

TEST(SampleSketch, DuplicatesAreIdempotent) {
  SampleSketch a(SampleMode::kPacket, 6, 1), b(SampleMode::kPacket, 6, 1);
  const auto ps = random_packets(500, 3, 50);
  for (const auto& p : ps) a.add(p);
  for (int rep = 0; rep < 3; ++rep) {
    for (const auto& p : ps) b.add(p);
  }
  EXPECT_EQ(a, b);
}

TEST(SampleSketch, FlowModeIgnoresPid) {
  SampleSketch a(SampleMode::kFlow, 6, 1), b(SampleMode::kFlow, 6, 1);
  a.add({42, 1});
  b.add({42, 999});
  b.add({42, 1000});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.filled_count(), 1U);
}

TEST(SampleSketch, EntriesDecodeIds) {
  SampleSketch s(SampleMode::kPacket, 12, 1);
  s.add({0x1234, 77});
  const auto e = s.sample_ids();
  ASSERT_EQ(e.size(), 1U);
  EXPECT_EQ(e[0].fid(SampleMode::kPacket), 0x1234U);
  EXPECT_EQ(e[0].pid(), 77U);
  SampleSketch f(SampleMode::kFlow, 12, 1);
  f.add({0x1234, 77});
  EXPECT_EQ(f.sample_ids()[0].fid(SampleMode::kFlow), 0x1234U);
}

TEST(SampleSketch, MergeEqualsUnionAndIsOrderFree) {
  const auto ps = random_packets(4000, 9, 900);
  SampleSketch whole(SampleMode::kPacket, 10, 4);
  for (const auto& p : ps) whole.add(p);
  // Three overlapping substreams covering every packet.
  SampleSketch s1(SampleMode::kPacket, 10, 4), s2(SampleMode::kPacket, 10, 4), s3(SampleMode::kPacket, 10, 4);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i % 2 == 0) s1.add(ps[i]);
    if (i % 3 != 0) s2.add(ps[i]);
    if (i % 5 == 0 || i % 3 == 0) s3.add(ps[i]);
  }
  EXPECT_EQ(merge(merge(s1, s2), s3), whole);
  EXPECT_EQ(merge(s1, merge(s2, s3)), whole);
  EXPECT_EQ(merge(merge(s3, s1), s2), whole);
  EXPECT_EQ(merge(whole, whole), whole);
  EXPECT_EQ(merge(s1, s2), merge(s2, s1));
}

TEST(SampleSketch, MergeRejectsIncompatible) {
  SampleSketch a(SampleMode::kPacket, 8, 1);
  EXPECT_THROW(a.merge_from(SampleSketch(SampleMode::kPacket, 9, 1)), Error);
  EXPECT_THROW(a.merge_from(SampleSketch(SampleMode::kPacket, 8, 2)), Error);
  EXPECT_THROW(a.merge_from(SampleSketch(SampleMode::kFlow, 8, 1)), Error);
  try {
    a.merge_from(SampleSketch(SampleMode::kFlow, 8, 1));
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kMismatch);
  }
  EXPECT_FALSE(a.compatible_with(SampleSketch(SampleMode::kPacket, 8, 2)));
  EXPECT_TRUE(a.compatible_with(SampleSketch(SampleMode::kPacket, 8, 1)));
}

TEST(SampleSketch, SerializationRoundTrip) {
  for (auto mode : {SampleMode::kPacket, SampleMode::kFlow}) {
    SampleSketch s(mode, 7, 123);
    for (const auto& p : random_packets(300, 5, 100)) s.add(p);
    const auto blob = s.serialize();
    EXPECT_EQ(SampleSketch::deserialize(blob), s);
    EXPECT_EQ(SampleSketch::deserialize(blob).serialize(), blob);
  }
}

TEST(SampleSketch, DeserializeRejectsCorruption) {
  SampleSketch s(SampleMode::kPacket, 5, 1);
  for (const auto& p : random_packets(50, 5, 100)) s.add(p);
  const auto blob = s.serialize();

  auto bad_magic = blob;
  bad_magic[0] ^= 0xff;
  EXPECT_THROW(SampleSketch::deserialize(bad_magic), Error);

  auto truncated = blob;
  truncated.pop_back();
  EXPECT_THROW(SampleSketch::deserialize(truncated), Error);

  auto extra = blob;
  extra.push_back(0);
  EXPECT_THROW(SampleSketch::deserialize(extra), Error);

  // Flip one bit in every byte position in turn; none may be accepted as a
  // different valid sketch.
  int accepted_changed = 0;
  for (std::size_t i = 0; i < blob.size(); ++i) {
    auto t = blob;
    t[i] ^= 0x01;
    try {
      if (!(SampleSketch::deserialize(t) == s)) ++accepted_changed;
    } catch (const Error& e) {
      EXPECT_EQ(e.category(), ErrorCategory::kFormat);
    }
  }
  EXPECT_EQ(accepted_changed, 0);
}

TEST(SampleSketch, AddressHelpers) {
  const auto fid = make_flow_id(0x0a000001, 0xc0a80001);
  EXPECT_EQ(source_address(fid), 0x0a000001U);
  EXPECT_EQ(destination_address(fid), 0xc0a80001U);
  EXPECT_EQ(mode_name(SampleMode::kPacket), "packet");
  EXPECT_EQ(mode_name(SampleMode::kFlow), "flow");
}
