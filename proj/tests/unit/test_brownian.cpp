#include <gtest/gtest.h>

#include <cmath>

#include "manistoch.hpp"

using namespace manistoch;

TEST(Driver, DeterministicGivenSeedAndIndex) {
  const auto a = make_driver(3, 1.0, 128, 11, 5);
  const auto b = make_driver(3, 1.0, 128, 11, 5);
  const auto c = make_driver(3, 1.0, 128, 11, 6);
  bool differs = false;
  for (int k = 0; k < 128; ++k) {
    for (int ch = 0; ch < 3; ++ch) {
      EXPECT_EQ(a.increment(k, ch), b.increment(k, ch));
      differs = differs || a.increment(k, ch) != c.increment(k, ch);
    }
  }
  EXPECT_TRUE(differs);
}

TEST(Driver, CoarseningIsExactAndNested) {
  const auto fine = make_driver(2, 1.0, 256, 3, 0);
  const auto direct = make_driver(2, 1.0, 16, 3, 0);
  const auto coarse = fine.coarsened(16);
  for (int k = 0; k < 16; ++k) {
    for (int ch = 0; ch < 2; ++ch) EXPECT_EQ(coarse.increment(k, ch), direct.increment(k, ch));
  }
  EXPECT_EQ(fine.endpoint(), coarse.endpoint());
}

TEST(Driver, IncrementsAreQuantized) {
  const auto d = make_driver(1, 0.5, 100, 4, 1);
  for (int k = 0; k < 100; ++k) {
    const double q = d.increment(k, 0) / BrownianDriver::quantum;
    EXPECT_EQ(q, std::nearbyint(q));
  }
}

TEST(Driver, ReversedFlipsOrderAndSign) {
  const auto d = make_driver(1, 1.0, 10, 5, 0);
  const auto r = d.reversed();
  for (int k = 0; k < 10; ++k) EXPECT_EQ(r.increment(k, 0), -d.increment(9 - k, 0));
  EXPECT_EQ(r.reversed().increment(3, 0), d.increment(3, 0));
}

TEST(Driver, ShiftAndTruncateSplitThePath) {
  const auto d = make_driver(2, 1.0, 40, 6, 2);
  const auto head = d.truncated(15);
  const auto tail = d.shifted(15);
  EXPECT_EQ(head.n_steps() + tail.n_steps(), 40);
  EXPECT_DOUBLE_EQ(head.horizon() + tail.horizon(), 1.0);
  for (int ch = 0; ch < 2; ++ch) {
    EXPECT_EQ(head.endpoint()[static_cast<std::size_t>(ch)] + tail.endpoint()[static_cast<std::size_t>(ch)],
              d.endpoint()[static_cast<std::size_t>(ch)]);
  }
}

TEST(Driver, EndpointVarianceMatchesHorizon) {
  const int n = 4000;
  const double T = 2.0;
  double s = 0.0;
  double s2 = 0.0;
  for (int p = 0; p < n; ++p) {
    const double w = make_driver(1, T, 8, 9, static_cast<std::uint64_t>(p)).endpoint()[0];
    s += w;
    s2 += w * w;
  }
  const double var = s2 / n - (s / n) * (s / n);
  EXPECT_NEAR(s / n, 0.0, 4.0 * std::sqrt(T / n));
  // var of a sample variance of N(0, T): T^2 2 / n
  EXPECT_NEAR(var, T, 4.0 * T * std::sqrt(2.0 / n));
}

TEST(Driver, RejectsBadArguments) {
  EXPECT_THROW(make_driver(1, 1.0, 0, 0, 0), UsageError);
  EXPECT_THROW(make_driver(1, 0.0, 4, 0, 0), UsageError);
  EXPECT_THROW(make_driver(1, 1.0, 12, 0, 0).coarsened(5), UsageError);
}

TEST(Rng, StreamsAreIndependentlySeeded) {
  Rng a(1, 0);
  Rng b(1, 1);
  EXPECT_NE(a.bits(), b.bits());
  Rng c(1, 0);
  Rng d(1, 0);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(c.normal(), d.normal());
}
