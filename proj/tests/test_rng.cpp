#include <gtest/gtest.h>

#include <cmath>

#include <sglab/rng.hpp>

using sglab::Philox4x32;

TEST(Philox, KnownAnswerVectors) {
  using B = Philox4x32::Block;
  using K = Philox4x32::Key;
  EXPECT_EQ(Philox4x32::generate(B{0, 0, 0, 0}, K{0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
  Philox4x32 a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  bool differ_c = false, differ_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differ_c |= x != c();
    differ_d |= x != d();
  }
  EXPECT_TRUE(differ_c);
  EXPECT_TRUE(differ_d);
}

TEST(Philox, UniformMoments) {
  Philox4x32 rng(7, 0);
  const int n = 200000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    ss += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(ss / n, 1.0 / 3.0, 4.0 * std::sqrt((1.0 / 5.0 - 1.0 / 9.0) / n));
}

TEST(Philox, ExponentialMean) {
  Philox4x32 rng(8, 0);
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += rng.exponential(2.0);
  EXPECT_NEAR(s / n, 0.5, 4.0 * 0.5 / std::sqrt(n));
}
