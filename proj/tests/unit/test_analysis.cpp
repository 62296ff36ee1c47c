#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bubble/analysis.hpp"
#include "bubble/error.hpp"
#include "bubble/model.hpp"
#include "bubble/stats.hpp"
#include "oracles.hpp"

using namespace bubble;

namespace {

const ModelParams kRegime1{4.0, 3.0, 5.0};
const ResponseSpec kCubic{0.4, 1, false};
const ModelParams kRegime2{0.2, 20.0, 0.6};
const ResponseSpec kQuintic90{90.0, 2, false};

double g_shifted(const ModelParams& p, const ResponseSpec& s, double x, double shift) {
    return static_cast<double>(p.nu * oracle::response(s.d, s.n, x, s.normalized) - x - shift);
}

double g_scan(const ModelParams& p, const ResponseSpec& s, double x, double shift) {
    return static_cast<double>(p.nu * oracle::response_libm(s.d, s.n, x) - x - shift);
}

}  // namespace

TEST(Roots, Regime1NearReportedValues) {
    const RootSet r = solve_roots(kRegime1, kCubic);
    EXPECT_NEAR(r.x1, -12.0, 1.0);
    EXPECT_NEAR(r.x2, -7.5, 1.0);
    EXPECT_NEAR(r.x3, -0.5, 1.0);
    EXPECT_NEAR(r.x4, 0.5, 1.0);
    EXPECT_NEAR(r.x5, 2.0, 1.0);
    EXPECT_NEAR(r.x6, 3.0, 1.0);
    EXPECT_LT(r.x1, r.x2);
    EXPECT_LT(r.x2, r.x3);
    EXPECT_LT(r.x3, 0.0);
    EXPECT_LT(0.0, r.x4);
    EXPECT_LT(r.x4, r.x5);
    EXPECT_LT(r.x5, r.x6);
}

TEST(Roots, Regime1FrozenValues) {
    // Frozen after agreement with the dense-scan oracle below.
    const RootSet r = solve_roots(kRegime1, kCubic);
    EXPECT_NEAR(r.x1, -11.846462919589356, 1e-9);
    EXPECT_NEAR(r.x2, -7.82792210300755, 1e-9);
    EXPECT_NEAR(r.x3, -0.7094949883131698, 1e-9);
    EXPECT_NEAR(r.x5, 1.7858310143782217, 1e-9);
    EXPECT_NEAR(r.x6, 3.5823515531609234, 1e-9);
}

TEST(Roots, Symmetry) {
    for (const auto& [p, s] : {std::pair{kRegime1, kCubic}, std::pair{kRegime2, kQuintic90},
                               std::pair{ModelParams{0.15, 2.0, 0.42}, ResponseSpec{90.0, 1, false}}}) {
        const RootSet r = solve_roots(p, s);
        EXPECT_NEAR(r.x3, -r.x4, 1e-10);
        EXPECT_NEAR(r.x2, -r.x4_upper, 1e-10);
    }
}

TEST(Roots, Residuals) {
    for (const auto& [p, s] : {std::pair{kRegime1, kCubic}, std::pair{kRegime2, kQuintic90},
                               std::pair{ModelParams{0.23, 2.0, 0.6}, kQuintic90},
                               std::pair{ModelParams{0.15, 2.0, 0.42}, ResponseSpec{90.0, 1, false}},
                               std::pair{ModelParams{4.0, 3.0, 8.0}, ResponseSpec{0.4, 1, true}}}) {
        const RootSet r = solve_roots(p, s);
        for (double x : {r.x2, r.x3, r.x4, r.x4_upper}) {
            EXPECT_LT(std::abs(g_shifted(p, s, x, 0.0)), 1e-8) << x;
        }
        for (double x : {r.x1, r.x5, r.x6}) {
            EXPECT_LT(std::abs(g_shifted(p, s, x, p.mu)), 1e-8) << x;
        }
    }
}

TEST(Roots, Regime2MatchesDenseScanOracle) {
    auto ga = [](double x) { return g_scan(kRegime2, kQuintic90, x, kRegime2.mu); };
    auto gb = [](double x) { return g_scan(kRegime2, kQuintic90, x, 0.0); };
    const auto a = oracle::grid_roots(ga, -3.0, 3.0);
    const auto b = oracle::grid_roots(gb, -3.0, 3.0);
    ASSERT_EQ(a.size(), 3u);
    // x = 0 is an exact root of the homogeneous balance.
    ASSERT_EQ(b.size(), 5u);
    const RootSet r = solve_roots(kRegime2, kQuintic90);
    EXPECT_NEAR(r.x1, a[0], 1e-6);
    EXPECT_NEAR(r.x5, a[1], 1e-6);
    EXPECT_NEAR(r.x6, a[2], 1e-6);
    EXPECT_NEAR(r.x2, b[0], 1e-6);
    EXPECT_NEAR(r.x3, b[1], 1e-6);
    EXPECT_NEAR(b[2], 0.0, 1e-9);
    EXPECT_NEAR(r.x4, b[3], 1e-6);
    EXPECT_NEAR(r.x4_upper, b[4], 1e-6);
}

TEST(Roots, StabilityByDerivativeSign) {
    for (const auto& [p, s] : {std::pair{kRegime1, kCubic}, std::pair{kRegime2, kQuintic90}}) {
        const RootSet r = solve_roots(p, s);
        EXPECT_LT(p.nu * response_derivative(s, r.x6), 1.0);
        EXPECT_GT(p.nu * response_derivative(s, r.x5), 1.0);
        EXPECT_LT(p.nu * response_derivative(s, r.x2), 1.0);
        EXPECT_GT(p.nu * response_derivative(s, r.x3), 1.0);
    }
}

TEST(Roots, SigmaDoesNotMatter) {
    ModelParams quiet = kRegime1;
    quiet.sigma = 0.0;
    EXPECT_EQ(solve_roots(quiet, kCubic), solve_roots(kRegime1, kCubic));
}

TEST(AssumptionII, NoPositiveRoots) {
    const ModelParams weak{1.0, 0.1, 0.5};
    EXPECT_EQ(assumption_II_status(weak, kCubic), AssumptionIIStatus::NoPositiveRoots);
    try {
        solve_roots(weak, kCubic);
        FAIL() << "expected AssumptionIIViolated";
    } catch (const AssumptionIIViolated& e) {
        EXPECT_EQ(e.status(), AssumptionIIStatus::NoPositiveRoots);
        EXPECT_EQ(e.code(), ErrorCode::AssumptionIIViolated);
    }
}

TEST(AssumptionII, ThreeNegativeRoots) {
    // A shallow cubic with strong speculation: u - nu S(u) rises above mu
    // before the response kicks in, then falls below it.
    const ModelParams p{0.5, 1.0, 20.0};
    const ResponseSpec s{0.01, 1, false};
    auto g = [&](double x) { return g_scan(p, s, x, p.mu); };
    const auto oracle_roots = oracle::grid_roots(g, -40.0, 40.0, 1e-3);
    int negative = 0;
    for (double x : oracle_roots) {
        negative += x < 0.0 ? 1 : 0;
    }
    ASSERT_EQ(negative, 3);
    EXPECT_EQ(assumption_II_status(p, s), AssumptionIIStatus::ThreeNegativeRoots);
    try {
        solve_roots(p, s);
        FAIL() << "expected AssumptionIIViolated";
    } catch (const AssumptionIIViolated& e) {
        EXPECT_EQ(e.status(), AssumptionIIStatus::ThreeNegativeRoots);
        EXPECT_NE(std::string(e.what()).find("non-panic collapse"), std::string::npos);
    }
    const AssumptionReport report = verify_assumptions(p, s);
    EXPECT_EQ(report.assumption_II_status, AssumptionIIStatus::ThreeNegativeRoots);
}

TEST(AssumptionII, DegenerateTangency) {
    // Tangency of nu S(x) and x + mu: S(x) / S'(x) = x + mu with nu = 1 / S'(x).
    const ResponseSpec s = kCubic;
    const double mu = 4.0;
    auto h = [&](double x) { return response_value(s, x) / response_derivative(s, x) - x - mu; };
    double lo = 1.0;
    double hi = 20.0;
    ASSERT_LT(h(lo) * h(hi), 0.0);
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (lo + hi);
        ((h(m) < 0.0) == (h(lo) < 0.0) ? lo : hi) = m;
    }
    const double x_star = 0.5 * (lo + hi);
    const ModelParams tangent{mu, 1.0, 1.0 / response_derivative(s, x_star)};
    EXPECT_EQ(assumption_II_status(tangent, s), AssumptionIIStatus::DegenerateTangency);
    ModelParams clear = tangent;
    clear.nu *= 1.05;
    EXPECT_EQ(assumption_II_status(clear, s), AssumptionIIStatus::Holds);
    clear.nu = tangent.nu * 0.95;
    EXPECT_EQ(assumption_II_status(clear, s), AssumptionIIStatus::NoPositiveRoots);
}

TEST(AssumptionI, Ratio) {
    const AssumptionReport r1 = verify_assumptions(kRegime1, kCubic);
    EXPECT_EQ(r1.assumption_I_ratio, 0.0);
    EXPECT_TRUE(r1.assumption_I_holds);
    EXPECT_EQ(r1.assumption_II_status, AssumptionIIStatus::Holds);

    const AssumptionReport r3 = verify_assumptions(ModelParams{0.15, 2.0, 0.42}, ResponseSpec{90.0, 1, false});
    EXPECT_EQ(r3.assumption_I_ratio, 0.0);
    EXPECT_TRUE(r3.assumption_I_holds);

    // S(x) = arctan(x): S'(0) = 1.
    const AssumptionReport linear = verify_assumptions(kRegime1, ResponseSpec{1.0, 0, false});
    EXPECT_DOUBLE_EQ(linear.assumption_I_ratio, 1.25);
    EXPECT_FALSE(linear.assumption_I_holds);
}

TEST(DeltaM, Regime1) {
    const RootSet r = solve_roots(kRegime1, kCubic);
    const double dm = find_delta_m(kRegime1, kCubic, r, 0.1);
    // Frozen value. The largest corridor that passes sits well below 1 for
    // these parameters; only the order of magnitude matches the figure
    // quoted in the literature.
    EXPECT_NEAR(dm, 0.36218209391224915, 1e-12);
    EXPECT_GT(dm, 0.1);
    EXPECT_LT(dm, 1.0);
    EXPECT_GT(r.x5, dm);
}

TEST(DeltaM, RecheckedOnFinerIndependentGrid) {
    for (const auto& [p, s] : {std::pair{kRegime1, kCubic}, std::pair{kRegime2, kQuintic90},
                               std::pair{ModelParams{0.15, 2.0, 0.42}, ResponseSpec{90.0, 1, false}}}) {
        const double c_m = 0.1;
        const double dm = find_delta_m(p, s, c_m);
        const int points = 2048;
        for (int i = 0; i < points; ++i) {
            const double x = dm / 4.0 + (dm - dm / 4.0) * i / (points - 1);
            const double sx = static_cast<double>(oracle::response_libm(s.d, s.n, x + dm));
            const double up = -p.mu * (1.0 - std::exp(-x)) + p.nu * sx;
            EXPECT_LT(up, -c_m * p.mu * dm) << "x=" << x;
            const double down = -p.mu * (1.0 - std::exp(x)) - p.nu * sx;
            EXPECT_GT(down, c_m * p.mu * dm) << "x=" << x;
        }
    }
}

TEST(DeltaM, IndependentOfSigma) {
    ModelParams quiet = kRegime1;
    quiet.sigma = 0.0;
    EXPECT_EQ(find_delta_m(quiet, kCubic), find_delta_m(kRegime1, kCubic));
}

TEST(DeltaM, HugeCmHasNoCorridor) {
    try {
        find_delta_m(kRegime1, kCubic, 1e3);
        FAIL() << "expected NoCorridorFound";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoCorridorFound);
    }
}

TEST(Scales, ArithmeticFromDefinitions) {
    RootSet r;
    r.x1 = -12.0;
    r.x2 = -7.5;
    r.x3 = -0.5;
    r.x4 = 0.5;
    r.x4_upper = 7.5;
    r.x5 = 2.0;
    r.x6 = 3.0;
    const Scales s = derive_scales(kRegime1, kCubic, r, 0.3, 0.1);
    EXPECT_DOUBLE_EQ(s.delta_b, 0.5);
    EXPECT_DOUBLE_EQ(s.a_b, 2.25);
    EXPECT_DOUBLE_EQ(s.delta_c, 3.5);
    EXPECT_DOUBLE_EQ(s.a_c, -2.25);
    EXPECT_THROW(derive_scales(kRegime1, kCubic, r, 2.5, 0.1), Error);
}

TEST(Scales, Regime1Consistency) {
    const Analysis a = analyze(kRegime1, kCubic);
    const Scales& s = a.scales;
    EXPECT_GT(s.c_b, 0.0);
    EXPECT_GT(s.c_c, 0.0);
    const double sb = static_cast<double>(oracle::response(0.4L, 1, s.a_b));
    const double sc = static_cast<double>(oracle::response(0.4L, 1, s.a_c));
    EXPECT_NEAR(5.0 * sb - 4.0 - s.a_b, s.c_b * s.delta_b, 1e-8);
    EXPECT_NEAR(5.0 * sc - s.a_c, -s.c_c * s.delta_c, 1e-8);
    EXPECT_GT(a.roots.x5, s.delta_m);
}

TEST(Rates, ReferenceValues) {
    Scales s;
    s.a_b = 2.25;
    s.delta_b = 0.5;
    const HeuristicRates r = heuristic_transition_rates(ModelParams{4.0, 3.0, 5.0}, s);
    EXPECT_FALSE(r.degenerate);
    const double l1 = static_cast<double>(oracle::normal_sf(3.75L));
    EXPECT_NEAR(l1, 8.84e-5, 5e-7);
    EXPECT_NEAR(r.lambda1 / l1, 1.0, 1e-10);
    const double l2 = static_cast<double>(oracle::normal_sf(1.0L / 6.0L));
    EXPECT_NEAR(l2, 0.4338, 5e-5);
    EXPECT_NEAR(r.lambda2, l2, 1e-12);
}

TEST(Rates, MonotoneInSigmaAndLimits) {
    Scales s;
    s.a_b = 2.25;
    s.delta_b = 0.5;
    double l1 = 0.0;
    double l2 = 0.0;
    for (double sigma : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const HeuristicRates r = heuristic_transition_rates(ModelParams{4.0, sigma, 5.0}, s);
        EXPECT_GT(r.lambda1, l1);
        EXPECT_GT(r.lambda2, l2);
        EXPECT_LT(r.lambda1, 0.5);
        EXPECT_LT(r.lambda2, 0.5);
        l1 = r.lambda1;
        l2 = r.lambda2;
    }
    const HeuristicRates big = heuristic_transition_rates(ModelParams{4.0, 1e9, 5.0}, s);
    EXPECT_NEAR(big.lambda1, 0.5, 1e-7);
    EXPECT_NEAR(big.lambda2, 0.5, 1e-7);
    const HeuristicRates none = heuristic_transition_rates(ModelParams{4.0, 0.0, 5.0}, s);
    EXPECT_TRUE(none.degenerate);
    EXPECT_EQ(none.lambda1, 0.0);
    EXPECT_EQ(none.lambda2, 0.0);
}
