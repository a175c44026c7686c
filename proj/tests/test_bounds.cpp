#include "lresnet/bounds.hpp"
#include "lresnet/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace lresnet;

TEST(Bounds, ContractionConstant) {
    EXPECT_DOUBLE_EQ(contraction_c(0.5, 1.0, 1.0), 0.5);
    EXPECT_DOUBLE_EQ(contraction_c(0.1, 1.0, 4.0), 0.9);
    const double h = 2.0 / 5.0;
    EXPECT_NEAR(std::abs(1.0 - 1.0 * h), std::abs(1.0 - 4.0 * h), 1e-15);
    EXPECT_THROW(contraction_c(0.5, 1.0, 4.0), std::invalid_argument);
    EXPECT_THROW(contraction_c(0.1, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(contraction_c(0.1, 2.0, 1.0), std::invalid_argument);
}

TEST(Bounds, RegimeClassification) {
    EXPECT_EQ(regime_of(0.1, 1.0, 4.0), Regime::First);
    EXPECT_EQ(regime_of(0.4, 1.0, 4.0), Regime::Boundary);
    EXPECT_EQ(regime_of(0.45, 1.0, 4.0), Regime::Second);
    EXPECT_EQ(regime_name(Regime::Boundary), "boundary");
}

TEST(Bounds, LmcAtZeroSteps) {
    const BoundReport r = w2_bound_lmc(0.1, 1.0, 1.0, 10, 0, 2.5);
    EXPECT_DOUBLE_EQ(r.term_contraction, 2.5);
    EXPECT_NEAR(r.total, 2.5 + 7.0 * std::numbers::sqrt2 / 6.0 * 1.0, 1e-14);
    EXPECT_EQ(r.term_approximation, 0.0);
}

TEST(Bounds, ExponentialLimit) {
    const double T = 2.0, m = 1.0;
    const std::size_t K = 1000000;
    const BoundReport r = w2_bound_lmc(T / K, m, 1.0, 1, K, 1.0);
    EXPECT_NEAR(r.term_contraction, std::exp(-m * T), 1e-3);
}

TEST(Bounds, SecondRegimeFactors) {
    const double m = 1.0, M = 3.0, h = 0.5 + 0.1;
    const BoundReport r = w2_bound_perturbed(h, m, M, 2, 7, 1.5, 0.2);
    EXPECT_EQ(r.regime, Regime::Second);
    const double q = std::pow(M * h - 1.0, 7);
    EXPECT_NEAR(r.term_contraction, q * 1.5, 1e-14);
    EXPECT_NEAR(r.term_discretization, 7.0 * std::numbers::sqrt2 / 6.0 * M * h / (2.0 - M * h) * std::sqrt(2 * h),
                1e-13);
    EXPECT_NEAR(r.term_approximation, (1.0 - q) / (2.0 - M * h) * h * 0.2, 1e-14);
}

TEST(Bounds, PerturbedReducesAndLimits) {
    const BoundReport a = w2_bound_lmc(0.1, 1.0, 2.0, 3, 20, 1.0);
    const BoundReport b = w2_bound_perturbed(0.1, 1.0, 2.0, 3, 20, 1.0, 0.0);
    EXPECT_EQ(a.total, b.total);
    EXPECT_NEAR(w2_bound_perturbed(0.1, 1.0, 1.0, 1, 1, 0.0, 0.5).term_approximation, 0.1 * 0.5, 1e-15);
    EXPECT_NEAR(w2_bound_perturbed(0.1, 2.0, 2.0, 1, 5000, 0.0, 0.5).term_approximation, 0.5 / 2.0, 1e-12);
}

TEST(Bounds, BranchesAgreeAtBoundary) {
    for (double m : {0.5, 1.0, 2.0})
        for (double M : {2.0, 3.0, 7.5}) {
            const double h = 2.0 / (m + M);
            const BoundReport f = w2_bound_branch(Regime::First, h, m, M, 4, 13, 1.2, 0.3);
            const BoundReport s = w2_bound_branch(Regime::Second, h, m, M, 4, 13, 1.2, 0.3);
            EXPECT_NEAR(f.total, s.total, 1e-12);
            EXPECT_EQ(f.regime, Regime::Boundary);
        }
}

TEST(Proxy, LmcEndpoints) {
    const ProxySequence s = proxy_lmc(2000, 0.1, 1.0, 1.0, 3.0);
    EXPECT_DOUBLE_EQ(s.values[0], 3.0);
    EXPECT_NEAR(s.values.back(), proxy_lmc_limit(0.1, 1.0, 1.0), 1e-12);
    EXPECT_DOUBLE_EQ(proxy_lmc_limit(0.1, 1.0, 1.0), 2.0);
}

TEST(Proxy, LinearGrowthReductionAndBound) {
    const ProxySequence a = proxy_lmc(50, 0.1, 1.0, 1.0, 1.0);
    const ProxySequence b = proxy_linear_growth(50, 0.1, 1.0, 1.0, 1.0, 0.0, 0.0);
    for (std::size_t k = 0; k <= 50; ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-14);
    const double G = 0.5, delta = 0.3, h = 0.1;
    const ProxySequence g = proxy_linear_growth(3000, h, 1.0, 1.0, 1.0, G, delta);
    const double bound = proxy_linear_growth_bound(h, 1.0, 1.0, 1.0, G, delta);
    for (double v : g.values) EXPECT_LE(v, bound);
    EXPECT_NEAR(g.values.back(), 2 * h / (1 - 0.9 - h * G) + h * h * delta * delta, 1e-10);
    EXPECT_THROW(proxy_linear_growth(5, h, 1.0, 1.0, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(Proxy, BoundedDriftTelescopes) {
    EXPECT_DOUBLE_EQ(proxy_bounded_drift(2.0, 0.5, 3, 0.0), 3.0);
    const std::vector<double> sup{0.5, 1.0, 2.0, 0.0, 3.0};
    const double h = 0.08;
    const ProxySequence s = proxy_bounded_drift_sequence(1.0, h, 4, sup);
    double total = 0.0;
    for (double v : sup) total += v;
    EXPECT_NEAR(s.values.back(), 1.0 + std::sqrt(2 * h) * 5 + 2.0 * h * total, 1e-14);
    EXPECT_NEAR(s.squared(5), s.values[5] * s.values[5], 1e-14);
    const ProxySequence lin = proxy_bounded_drift_sequence(1.0, h, 4, std::vector<double>(10, 1.0));
    for (std::size_t k = 2; k < lin.values.size(); ++k)
        EXPECT_NEAR(lin.values[k] - lin.values[k - 1], lin.values[1] - lin.values[0], 1e-14);
}

TEST(Radius, DomainSatisfiesTail) {
    const double r = radius_domain(0.1, 1.0, 2, 1.0, 0.0);
    EXPECT_TRUE(radius_domain_tail(r, 0.1, 1.0, 2, 1.0, 0.0).holds());
    EXPECT_GT(radius_domain(0.1, 2.0, 2, 1.0, 0.0), r);
    EXPECT_GT(radius_domain(0.05, 1.0, 2, 1.0, 0.0), r);
    EXPECT_GT(radius_domain(0.1, 1.0, 4, 1.0, 0.0), r);
    EXPECT_THROW(radius_domain(1.0, 1.0, 2, 1.0, 0.0), std::invalid_argument);
}

TEST(Radius, DomainFormulaCanMissItsTailForLargeEps) {
    // The printed radius is too small when eps is close to 1.
    const double r = radius_domain(0.9, 1.0, 10, 1.0, 0.0);
    const TailCheck t = radius_domain_tail(r, 0.9, 1.0, 10, 1.0, 0.0);
    EXPECT_FALSE(t.holds());
    EXPECT_NEAR(t.lhs, 0.4968, 1e-3);
}

TEST(Radius, LipschitzSatisfiesTailAndEnvelope) {
    const double r = radius_lipschitz(0.1, 1.0, 2, 1.0, 1.2);
    EXPECT_TRUE(radius_lipschitz_tail(r, 0.1, 1.0, 2, 1.0, 1.2).holds());
    EXPECT_LT(radius_lipschitz(0.1, 1.0, 2, 1.0, 1.05), r);
    for (std::size_t d : {1u, 2u, 5u, 10u})
        for (double eps : {0.01, 0.1, 0.5})
            for (double sigma : {0.5, 1.0, 2.0})
                EXPECT_LE(radius_lipschitz(eps, sigma, d, 1.0, 1.2), radius_lipschitz_envelope(eps, sigma, d, 1.0, 1.2));
    EXPECT_THROW(radius_lipschitz(0.1, 1.0, 2, 1.0, 1.5), std::invalid_argument);
    EXPECT_GT(lipschitz_sigma(0.1, 1.0, 1.2, 1.0), 0.0);
}

TEST(Delta, LinearDeltaProperties) {
    for (double eps : {0.01, 0.1, 0.5}) EXPECT_LT(delta_linear(eps, 2, 1.0, 1.0, 1.0), eps);
    EXPECT_GT(delta_linear(0.1, 1, 1.0, 1.0, 1.0), delta_linear(0.1, 2, 1.0, 1.0, 1.0));
    EXPECT_GT(delta_linear(0.1, 2, 1.0, 1.0, 1.0), delta_linear(0.1, 5, 1.0, 1.0, 1.0));
    const double delta = delta_linear(0.1, 1, 1.0, 1.0, 1.0);
    // For h <= 2/(m+M) the chained bound stays below eps^2.
    EXPECT_LE(delta_linear_chain(delta, 1, 1.0, 1.0, 1.0), 0.01);
    EXPECT_LE(delta_linear_chain(delta, 1, 1.0, 0.1, 1.0), 0.01);
}

TEST(Lyapunov, SeriesValues) {
    EXPECT_DOUBLE_EQ(lyapunov_ell(0.0, 5), 1.0);
    EXPECT_DOUBLE_EQ(lyapunov_ell(2.0, 1), std::cosh(2.0));
    EXPECT_NEAR(lyapunov_series(2.0, 1), std::cosh(2.0), 1e-12);
    // d = 3: sinh(z)/z.
    EXPECT_NEAR(lyapunov_series(1.0, 3), std::sinh(1.0), 1e-14);
    EXPECT_NEAR(lyapunov_series(5.0, 3), std::sinh(5.0) / 5.0, 1e-12);
    EXPECT_NEAR(lyapunov_mc(1.0, 3, 200000, 1), lyapunov_series(1.0, 3), 0.01 * lyapunov_series(1.0, 3));
    for (std::size_t d = 1; d <= 8; ++d)
        for (double z : {0.01, 0.5, 2.0, 10.0}) {
            EXPECT_GE(lyapunov_ell(z, d), 1.0);
            EXPECT_LE(lyapunov_ell(z, d), std::cosh(z) * (1 + 1e-14));
        }
}

TEST(Lyapunov, GaussianSmoothingIdentity) {
    EXPECT_EQ(gaussian_smoothing_identity_check({0.3, 0.1}, 0.0, 1.0, 1000, 1), 0.0);
    EXPECT_LT(gaussian_smoothing_identity_check({0.5}, 1.0, 0.2, 1000000, 2), 0.02);
    std::vector<double> x{0.5, -0.5, 0.5, 0.5};
    EXPECT_LT(gaussian_smoothing_identity_check(x, 0.7, 1.0, 400000, 3), 0.02);
}

TEST(NormProxy, ValuesAndGaussianTail) {
    EXPECT_DOUBLE_EQ(norm_proxy(1.7, 1), 1.7);
    EXPECT_DOUBLE_EQ(norm_proxy(1.0, 6), 4.0 * norm_proxy(1.0, 3));
    const CounterRng rng(8, kUser);
    const int n = 200000;
    for (double r : {3.0, 4.0, 5.0}) {
        int hits = 0;
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < 3; ++j) s += std::pow(rng.normal(0, i, j), 2);
            hits += std::sqrt(s) >= r;
        }
        EXPECT_LE(double(hits) / n, std::exp(-r * r / (2.0 * norm_proxy(1.0, 3))));
    }
}

TEST(Cover, PowerLaw) {
    EXPECT_NEAR(cover_count_ball(2, 1.0, 1.0, 0.1), std::sqrt(2.0) * 10.0, 1e-12);
    for (std::size_t d : {1u, 3u, 6u}) {
        const double base = cover_count_ball(d, 1.5, 2.0, 0.2);
        EXPECT_NEAR(cover_count_ball(d, 3.0, 2.0, 0.2) / base, std::pow(2.0, d / 2.0), 1e-12);
        EXPECT_NEAR(cover_count_ball(d, 1.5, 2.0, 0.1) / base, std::pow(2.0, d / 2.0), 1e-12);
    }
}
