#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "netsample/cm_distinct.hpp"
#include "netsample/error.hpp"

using namespace netsample;

TEST(CmDistinct, ParamsFromAccuracy) {
  const auto p = CmDistinctParams::from(0.1, 0.25);
  EXPECT_EQ(p.width, 40U);
  EXPECT_EQ(p.depth, 3U);
  EXPECT_DOUBLE_EQ(p.eps_a, 0.0125);
  EXPECT_DOUBLE_EQ(p.delta_a, 0.25 / 6.0);
  EXPECT_EQ(p.register_bits, 13U);
  // Exact powers must not round up.
  EXPECT_EQ(CmDistinctParams::from(0.5, 0.5).width, 8U);
  EXPECT_EQ(CmDistinctParams::from(0.5, 0.5).depth, 2U);
  EXPECT_THROW(CmDistinctParams::from(0.0, 0.5), Error);
  EXPECT_THROW(CmDistinctParams::from(0.5, 1.0), Error);
}

TEST(CmDistinct, ColumnsInRangeAndDeterministic) {
  CmDistinct a(0.1, 0.25, 5), b(0.1, 0.25, 5);
  for (std::uint64_t k = 0; k < 5000; ++k) {
    for (std::size_t r = 0; r < 3; ++r) {
      ASSERT_LT(a.column(r, k), 40U);
      ASSERT_EQ(a.column(r, k), b.column(r, k));
    }
  }
}

TEST(CmDistinct, EmptyAndNonNegative) {
  CmDistinct c(0.2, 0.25, 1);
  EXPECT_DOUBLE_EQ(c.query(12345), 0.0);
  for (std::uint64_t p = 0; p < 100; ++p) c.add(p % 5, p);
  for (std::uint64_t k = 0; k < 100; ++k) EXPECT_GE(c.query(k), 0.0);
}

TEST(CmDistinct, SingleFlowWithinAccuracyFactor) {
  CmDistinct c(0.1, 0.25, 3);
  for (std::uint64_t p = 0; p < 500; ++p) c.add(9, p);
  const double eps_a = c.params().eps_a;
  const double f = c.query(9);
  // Cell counters overshoot or undershoot by a small relative error; the
  // result is then scaled by (1 + 2 eps_a).
  EXPECT_GE(f, 500.0 * (1.0 - 3.0 * eps_a));
  EXPECT_LE(f, 500.0 * (1.0 + 2.0 * eps_a) * (1.0 + 3.0 * eps_a));
}

TEST(CmDistinct, DuplicatePacketsCountedOnce) {
  CmDistinct a(0.1, 0.25, 3), b(0.1, 0.25, 3);
  for (std::uint64_t p = 0; p < 300; ++p) {
    a.add(p % 4, p);
    b.add(p % 4, p);
    b.add(p % 4, p);
  }
  EXPECT_EQ(a, b);
}

TEST(CmDistinct, MergeEqualsUnion) {
  std::mt19937_64 g(2);
  CmDistinct r1(0.2, 0.25, 8), r2(0.2, 0.25, 8), whole(0.2, 0.25, 8);
  for (std::uint64_t p = 0; p < 2000; ++p) {
    const auto fid = g() % 50;
    whole.add(fid, p);
    switch (g() % 3) {
      case 0: r1.add(fid, p); break;
      case 1: r2.add(fid, p); break;
      default:
        r1.add(fid, p);
        r2.add(fid, p);
    }
  }
  const CmDistinct routers[] = {r1, r2};
  EXPECT_EQ(cmd_merge(routers), whole);
  EXPECT_THROW(r1.merge_from(CmDistinct(0.2, 0.25, 9)), Error);
  EXPECT_THROW(r1.merge_from(CmDistinct(0.1, 0.25, 8)), Error);
}

TEST(CmDistinct, SerializeRoundTrip) {
  CmDistinct c(0.3, 0.3, 11);
  for (std::uint64_t p = 0; p < 400; ++p) cmd_add(c, p % 13, p);
  const auto blob = c.serialize();
  const auto back = CmDistinct::deserialize(blob);
  EXPECT_EQ(back, c);
  EXPECT_DOUBLE_EQ(cmd_query(back, 3), cmd_query(c, 3));
  auto bad = blob;
  bad.resize(bad.size() - 1);
  EXPECT_THROW(CmDistinct::deserialize(bad), Error);
}

TEST(CmDistinct, FrozenViewMatchesQuery) {
  CmDistinct c(0.1, 0.25, 4);
  for (std::uint64_t p = 0; p < 3000; ++p) c.add(p % 97, p);
  const FrozenCmDistinct f(c);
  for (std::uint64_t k = 0; k < 200; ++k) EXPECT_DOUBLE_EQ(f.query(k), c.query(k));
}

TEST(CmDistinct, RowEstimateIsCellEstimate) {
  CmDistinct c(0.2, 0.25, 4);
  for (std::uint64_t p = 0; p < 100; ++p) c.add(p % 3, p);
  for (std::size_t r = 0; r < c.params().depth; ++r) {
    EXPECT_DOUBLE_EQ(c.row_estimate(r, 1), c.cell(r, c.column(r, 1)).query());
  }
}
