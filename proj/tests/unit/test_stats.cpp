#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bubble/stats.hpp"
#include "oracles.hpp"

using namespace bubble;

TEST(NormalCdf, ReferenceValues) {
    EXPECT_EQ(normal_cdf(0.0), 0.5);
    const double phi1 = static_cast<double>(oracle::normal_cdf(1.0L));
    EXPECT_NEAR(phi1, 0.8413447460685429, 1e-15);
    EXPECT_NEAR(normal_cdf(1.0), phi1, 1e-12);
}

TEST(NormalCdf, QuadratureGridAndSymmetry) {
    for (double x = -8.0; x <= 8.0; x += 0.125) {
        EXPECT_NEAR(normal_cdf(x), static_cast<double>(oracle::normal_cdf(x)), 1e-12) << x;
        EXPECT_NEAR(normal_cdf(-x), 1.0 - normal_cdf(x), 1e-12) << x;
    }
}

TEST(NormalSf, RelativeAccuracyInTail) {
    for (double x : {0.5, 1.0, 3.75, 6.0, 10.0, 20.0}) {
        const double ref = static_cast<double>(oracle::normal_sf(x));
        EXPECT_NEAR(normal_sf(x) / ref, 1.0, 1e-12) << x;
    }
}

TEST(Wilson, KnownInterval) {
    // 30 of 100 at z = 1.96: the textbook Wilson interval is (0.2189, 0.3958).
    const WilsonInterval w = wilson_interval(30, 100);
    EXPECT_NEAR(w.lo, 0.21894, 5e-5);
    EXPECT_NEAR(w.hi, 0.39584, 5e-5);
    const WilsonInterval zero = wilson_interval(0, 100);
    EXPECT_EQ(zero.lo, 0.0);
    EXPECT_GT(zero.hi, 0.0);
    const WilsonInterval all = wilson_interval(100, 100);
    EXPECT_EQ(all.hi, 1.0);
    EXPECT_LT(all.lo, 1.0);
}

TEST(Wilson, ShrinksLikeInverseRootN) {
    const WilsonInterval a = wilson_interval(300, 1000);
    const WilsonInterval b = wilson_interval(30000, 100000);
    const double ratio = (a.hi - a.lo) / (b.hi - b.lo);
    EXPECT_NEAR(ratio, 10.0, 0.1);
}

TEST(Wilson, CoverageOfBernoulliPointThree) {
    std::mt19937_64 gen(2024);
    std::bernoulli_distribution coin(0.3);
    int covered = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        std::uint64_t k = 0;
        for (int i = 0; i < 500; ++i) {
            k += coin(gen) ? 1 : 0;
        }
        const WilsonInterval w = wilson_interval(k, 500);
        covered += (w.lo <= 0.3 && 0.3 <= w.hi) ? 1 : 0;
    }
    // Binomial(1000, 0.95) has standard deviation 6.9.
    EXPECT_GE(covered, 925);
    EXPECT_LE(covered, 975);
}

TEST(StabilityBound, Shape) {
    EXPECT_NEAR(stability_bound(1.0, 1.0, 1.0), 2.0 * normal_cdf(1.0) - 1.0, 1e-15);
    EXPECT_EQ(stability_bound(1.0, 0.0, 1.0), 1.0);
    double previous = 1.0;
    for (double sigma : {0.5, 1.0, 2.0, 3.0}) {
        const double v = stability_bound(0.9, sigma, 1.0);
        EXPECT_LT(v, previous);
        previous = v;
    }
    EXPECT_LT(stability_bound(0.9, 1.0, 2.0), stability_bound(0.9, 1.0, 1.0));
}
