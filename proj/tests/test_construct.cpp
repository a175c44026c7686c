#include "lresnet/construct.hpp"
#include "lresnet/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lresnet;

namespace {

Vec uniform_point(std::size_t d, std::uint32_t i, double half, std::uint64_t seed = 5) {
    const CounterRng rng(seed, kUser);
    Vec x(d);
    for (std::size_t j = 0; j < d; ++j) x(j) = half * (2.0 * rng.uniform(0, i, j) - 1.0);
    return x;
}

double relu(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

class ConstructCounts : public ::testing::TestWithParam<std::size_t> {};

TEST_P(ConstructCounts, ParameterAndDepthFormulas) {
    const std::size_t d = GetParam();
    const Fcnn id = identity_net(d);
    EXPECT_EQ(param_count(id).nonzero, 4 * d);
    EXPECT_EQ(depth(id), 1u);
    const Fcnn l1 = l1_net(d);
    EXPECT_EQ(param_count(l1).nonzero, 4 * d);
    EXPECT_EQ(depth(l1), 1u);
    const Fcnn ind = indicator_net(d, 1.0, 0.2);
    EXPECT_EQ(param_count(ind).nonzero, 4 * d + 7);
    EXPECT_EQ(depth(ind), 3u);
    const Fcnn cut = cutoff(id, 1.0);
    EXPECT_EQ(depth(cut), depth(id) + 2);
    EXPECT_EQ(param_count(cut).dense, param_count(id).dense + 2 * d * d + 2 * d);
    EXPECT_EQ(depth(linear_drift_net(d, 0.5)), 1u);
    EXPECT_EQ(param_count(linear_drift_net(d, 0.5)).nonzero, 4 * d);
}

INSTANTIATE_TEST_SUITE_P(Dims, ConstructCounts, ::testing::Values(1, 2, 3, 5, 10));

TEST(Construct, IdentityAndL1AreExact) {
    for (std::size_t d : {1u, 4u}) {
        for (int i = 0; i < 500; ++i) {
            const Vec x = uniform_point(d, i, 3.0);
            EXPECT_EQ(realize(identity_net(d), x), x);
            EXPECT_NEAR(realize(l1_net(d), x)(0), x.lpNorm<1>(), 1e-14);
        }
    }
}

TEST(Construct, IndicatorRampValues) {
    const Fcnn ind = indicator_net(2, 1.0, 0.2);
    Vec x = Vec::Zero(2);
    for (auto [rho, expected] : {std::pair{0.5, 1.0}, {1.1, 0.5}, {1.4, 0.0}, {1.0, 1.0}, {1.2, 0.0}}) {
        x(0) = rho;
        EXPECT_NEAR(realize(ind, x)(0), expected, 1e-12) << rho;
    }
    for (int i = 0; i < 500; ++i) {
        const Vec y = uniform_point(2, i, 1.0);
        const double n1 = y.lpNorm<1>();
        EXPECT_NEAR(realize(ind, y)(0), 1.0 - (relu(n1 - 1.0) - relu(n1 - 1.2)) / 0.2, 1e-12);
    }
    EXPECT_THROW(indicator_net(2, 1.0, 0.0), std::invalid_argument);
}

TEST(Construct, CutoffClampsComponentwise) {
    Vec c(3);
    c << 0.5, 1.0, 2.0;
    const Fcnn net = cutoff(identity_net(3), c);
    for (int i = 0; i < 500; ++i) {
        const Vec x = uniform_point(3, i, 4.0);
        EXPECT_LT((realize(net, x) - x.cwiseMax(-c).cwiseMin(c)).cwiseAbs().maxCoeff(), 1e-12);
    }
    EXPECT_THROW(cutoff(identity_net(3), Vec::Constant(2, 1.0)), std::invalid_argument);
    EXPECT_THROW(cutoff(identity_net(3), -1.0), std::invalid_argument);
}

TEST(Construct, MultLevelsFormula) {
    EXPECT_EQ(mult_levels(2.0, 1e-2), static_cast<int>(std::ceil(std::log2(1200.0))));
    EXPECT_EQ(mult_levels(0.1, 0.5), 1);
}

TEST(Construct, MultiplicationErrorAndExactZeros) {
    const double M = 2.0, eps = 1e-2;
    const Fcnn net = mult_net({M, eps, 0});
    double worst = 0.0;
    Vec x(2);
    for (int i = 0; i <= 200; ++i)
        for (int j = 0; j <= 200; ++j) {
            x << -M + 2 * M * i / 200.0, -M + 2 * M * j / 200.0;
            worst = std::max(worst, std::abs(realize(net, x)(0) - x(0) * x(1)));
        }
    EXPECT_LE(worst, eps);
    for (int i = 0; i <= 200; ++i) {
        const double t = -M + 2 * M * i / 200.0;
        x << 0.0, t;
        EXPECT_EQ(realize(net, x)(0), 0.0);
        x << t, 0.0;
        EXPECT_EQ(realize(net, x)(0), 0.0);
    }
}

TEST(Construct, MultiplicationErrorShrinksWithLevels) {
    // Sawtooth error bound M^2 2^(-2s-1) per level count.
    const double M = 1.0;
    Vec x(2);
    for (int s = 1; s <= 6; ++s) {
        const Fcnn net = mult_net({M, 0.5, s});
        double worst = 0.0;
        for (int i = 0; i <= 60; ++i)
            for (int j = 0; j <= 60; ++j) {
                x << -M + 2 * M * i / 60.0, -M + 2 * M * j / 60.0;
                worst = std::max(worst, std::abs(realize(net, x)(0) - x(0) * x(1)));
            }
        EXPECT_LE(worst, M * M * std::ldexp(1.0, -2 * s - 1) * (1 + 1e-12)) << s;
    }
}

TEST(Construct, ElementwiseMultiplication) {
    const std::size_t d = 4;
    const ElementwiseRange range{0.0, 1.0, -2.0, 2.0};
    const double eps = 1e-2;
    const Fcnn net = elementwise_mult_net(d, range, eps);
    ASSERT_EQ(net.input_dim(), d + 1);
    ASSERT_EQ(net.output_dim(), d);
    const CounterRng rng(3, kUser);
    for (int i = 0; i < 2000; ++i) {
        Vec x(d + 1);
        x(0) = rng.uniform(0, i, 0);
        for (std::size_t j = 0; j < d; ++j) x(j + 1) = 4.0 * rng.uniform(1, i, j) - 2.0;
        const Vec expect = x(0) * x.tail(d);
        EXPECT_LE((realize(net, x) - expect).lpNorm<1>(), eps);
    }
    Vec z = Vec::Zero(d + 1);
    z.tail(d).setConstant(1.5);
    EXPECT_EQ(realize(net, z), Vec::Zero(d));
    EXPECT_DOUBLE_EQ(elementwise_half_width({1.0, 2.0, 1.0, 2.0}), 2.0);
}

TEST(Construct, LinearNets) {
    Mat A(2, 3);
    A << 1, -2, 0.5, 3, 0, -1;
    const Fcnn lin = linear_net(A);
    for (int i = 0; i < 200; ++i) {
        const Vec x = uniform_point(3, i, 5.0);
        EXPECT_LT((realize(lin, x) - A * x).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((realize(linear_drift_net(3, 0.7), x) + 0.7 * x).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Construct, CompositeDriftGuarantees) {
    // Gaussian potential with precision diag(1, 1.2): m = 1, M = 1.2, exact residual net.
    const double m = 1.0, M = 1.2, r = 1.5, eps = 0.05;
    Mat P = Mat::Zero(2, 2);
    P(0, 0) = 1.0;
    P(1, 1) = 1.2;
    const Fcnn local = linear_net(-(P - m * Mat::Identity(2, 2)));
    CompositeInfo info;
    const Fcnn net = composite_drift_net(local, {r, m, M, eps, 0.0}, &info);
    EXPECT_GT(info.b, r);
    EXPECT_NEAR(info.clamp, r * std::sqrt(M * M - m * m), 1e-15);
    const double G = std::sqrt(M * M - m * m);
    for (int i = 0; i < 4000; ++i) {
        const Vec x = uniform_point(2, i, 6.0, 17);
        const double err = (realize(net, x) + P * x).norm();
        EXPECT_LE(err, 9 * eps + G * x.norm());
        if (x.lpNorm<1>() <= r) EXPECT_LE(err, 2 * eps) << x.transpose();
    }
}

TEST(Construct, CompositeWithZeroResidualIsLinearDrift) {
    const Fcnn zero({{Mat::Zero(2, 2), Vec::Zero(2)}, {Mat::Zero(2, 2), Vec::Zero(2)}});
    const Fcnn net = composite_drift_net(zero, {1.0, 1.0, 1.0, 0.1, 0.0});
    for (int i = 0; i < 200; ++i) {
        const Vec x = uniform_point(2, i, 3.0);
        EXPECT_EQ(realize(net, x), Vec(-x));
    }
}
