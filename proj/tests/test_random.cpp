#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>

#include "maxent/random.hpp"

using namespace maxent;

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswers) {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  EXPECT_EQ(philox4x32_10(A4{0, 0, 0, 0}, A2{0, 0}), (A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(philox4x32_10(A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, A2{0xffffffffu, 0xffffffffu}),
            (A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(philox4x32_10(A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, A2{0xa4093822u, 0x299f31d0u}),
            (A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(CounterRng, StreamsAreReproducibleAndDistinct) {
  CounterRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    same_c += x == c.next_u64();
    same_d += x == d.next_u64();
  }
  EXPECT_EQ(same_c, 0);
  EXPECT_EQ(same_d, 0);
}

TEST(CounterRng, UniformRange) {
  CounterRng rng(1, 2);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform(), v = rng.uniform_pos();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
    sum += u;
  }
  // mean of 1e5 uniforms has sd ~ 9e-4
  EXPECT_NEAR(sum / 100000.0, 0.5, 5e-3);
}

TEST(CounterRng, DerivedStreamsDiffer) {
  EXPECT_NE(derive_stream(1, 2, 3), derive_stream(1, 3, 2));
  EXPECT_NE(derive_stream(1, 2), derive_stream(2, 2));
  EXPECT_EQ(derive_stream(5, 6, 7), derive_stream(5, 6, 7));
}

TEST(SampleCategorical, SkipsZeroWidthBins) {
  const std::vector<double> cum{0.25, 0.25, 1.0};
  EXPECT_EQ(sample_categorical(cum, 0.0), 0u);
  EXPECT_EQ(sample_categorical(cum, 0.25), 2u);
  EXPECT_EQ(sample_categorical(cum, 0.9999), 2u);
}

TEST(ParallelForChunks, VisitsEveryChunkOnce) {
  for (std::size_t threads : {1u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for_chunks(hits.size(), threads, [&](std::size_t c) { ++hits[c]; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelForChunks, PropagatesExceptions) {
  for (std::size_t threads : {1u, 4u}) {
    EXPECT_THROW(parallel_for_chunks(100, threads,
                                     [](std::size_t c) {
                                       if (c == 37) throw std::runtime_error("boom");
                                     }),
                 std::runtime_error);
  }
}
