#include <cstdint>
#include <set>

#include <gtest/gtest.h>

#include "ancova_cp/rng.hpp"

using ancova_cp::rng::Philox4x32;

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::bijection({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5U);
  EXPECT_EQ(out[1], 0xe169c58dU);
  EXPECT_EQ(out[2], 0xbc57ac4cU);
  EXPECT_EQ(out[3], 0x9b00dbd8U);
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = Philox4x32::bijection({0xffffffffU, 0xffffffffU, 0xffffffffU, 0xffffffffU}, {0xffffffffU, 0xffffffffU});
  EXPECT_EQ(out[0], 0x408f276dU);
  EXPECT_EQ(out[1], 0x41c83b0eU);
  EXPECT_EQ(out[2], 0xa20bc7c6U);
  EXPECT_EQ(out[3], 0x6d5451fdU);
}

TEST(Philox, KnownAnswerPi) {
  const auto out = Philox4x32::bijection({0x243f6a88U, 0x85a308d3U, 0x13198a2eU, 0x03707344U},
                                         {0xa4093822U, 0x299f31d0U});
  EXPECT_EQ(out[0], 0xd16cfe09U);
  EXPECT_EQ(out[1], 0x94fdccebU);
  EXPECT_EQ(out[2], 0x5001e420U);
  EXPECT_EQ(out[3], 0x24126ea1U);
}

TEST(Philox, GeneratorWalksCounter) {
  Philox4x32 gen(0, 0);
  const auto first = Philox4x32::bijection({0, 0, 0, 0}, {0, 0});
  const auto second = Philox4x32::bijection({1, 0, 0, 0}, {0, 0});
  for (auto w : first) EXPECT_EQ(gen(), w);
  for (auto w : second) EXPECT_EQ(gen(), w);
}

TEST(Streams, DistinctPurposesAndChunksDiffer) {
  using ancova_cp::rng::make_stream;
  using ancova_cp::rng::Purpose;
  std::set<std::uint32_t> firsts;
  for (auto p : {Purpose::Naive, Purpose::Conditioned, Purpose::Gate, Purpose::SelectionGap, Purpose::RawOracle}) {
    for (std::uint64_t chunk = 0; chunk < 4; ++chunk) firsts.insert(make_stream(7, 11, p, chunk)());
  }
  EXPECT_EQ(firsts.size(), 20U);
  auto a = make_stream(7, 11, Purpose::Naive, 3);
  auto b = make_stream(7, 11, Purpose::Naive, 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}
