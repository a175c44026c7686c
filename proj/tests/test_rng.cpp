#include "lresnet/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace lresnet;

// Known-answer vectors of Philox4x32-10 from the Random123 distribution.
TEST(Philox, KnownAnswerZero) {
    const CounterRng rng(0, 0);
    const auto out = rng.block(0, 0, 0);
    EXPECT_EQ(out[0], 0x6627e8d5u);
    EXPECT_EQ(out[1], 0xe169c58du);
    EXPECT_EQ(out[2], 0xbc57ac4cu);
    EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
    const CounterRng rng(0xffffffffffffffffULL, 0xffffffffu);
    const auto out = rng.block(0xffffffffu, 0xffffffffu, 0xffffffffu);
    EXPECT_EQ(out[0], 0x408f276du);
    EXPECT_EQ(out[1], 0x41c83b0eu);
    EXPECT_EQ(out[2], 0xa20bc7c6u);
    EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Rng, UniformInOpenInterval) {
    const CounterRng rng(42, kUser);
    double sum = 0.0;
    for (std::uint32_t i = 0; i < 100000; ++i) {
        const double u = rng.uniform(0, i, 0, static_cast<int>(i % 2));
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
}

TEST(Rng, NormalMoments) {
    const CounterRng rng(7, kUser);
    const int n = 400000;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal(1, i / 4, i % 4);
        s1 += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    EXPECT_NEAR(s1 / n, 0.0, 5.0 / std::sqrt(n));
    EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
    EXPECT_NEAR(s4 / n, 3.0, 0.1);
}

TEST(Rng, PureFunctionOfCoordinates) {
    const CounterRng a(11, kChainNoise), b(11, kChainNoise), c(11, kInitialCloud), e(12, kChainNoise);
    EXPECT_EQ(a.normal(3, 4, 5), b.normal(3, 4, 5));
    EXPECT_NE(a.normal(3, 4, 5), c.normal(3, 4, 5));
    EXPECT_NE(a.normal(3, 4, 5), e.normal(3, 4, 5));
    EXPECT_NE(a.normal(3, 4, 4), a.normal(3, 4, 5));
}

TEST(Rng, DerivedSeedsDiffer) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(1, i));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_EQ(derive_seed(5, 9), derive_seed(5, 9));
}
