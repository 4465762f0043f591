#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "geofwd/geometry.hpp"
#include "geofwd/random.hpp"
#include "oracles.hpp"

using namespace geofwd;

namespace {

// Monte-Carlo area of {|p| <= 1, |p - sink| < L - z} by rejection from the square [-1, 1]^2.
struct McArea {
    double mean;
    double se;
};

McArea monte_carlo_area(double L, double z, std::size_t n, std::uint64_t seed) {
    Stream rng(seed);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = 2.0 * rng.uniform() - 1.0;
        const double y = 2.0 * rng.uniform() - 1.0;
        if (x * x + y * y <= 1.0 && std::hypot(L - x, y) < L - z) ++hits;
    }
    const double p = static_cast<double>(hits) / n;
    return {4.0 * p, 4.0 * std::sqrt(p * (1.0 - p) / n)};
}

} // namespace

TEST(HopContext, RejectsBadInputs) {
    EXPECT_THROW(HopContext(0.0, 3), DomainError);
    EXPECT_THROW(HopContext(-2.0, 3), DomainError);
    EXPECT_THROW(HopContext(5.0, -1), DomainError);
    EXPECT_THROW(HopContext::from_raw(5.0, 0.0, 3), DomainError);
    EXPECT_DOUBLE_EQ(HopContext::from_raw(20.0, 2.0, 3).distance(), 10.0);
    EXPECT_TRUE(HopContext(1.0, 3).reaches_sink());
    EXPECT_FALSE(HopContext(1.0001, 3).reaches_sink());
}

TEST(RegionArea, MatchesLensClosedForm) {
    for (double L : {1.05, 1.5, 2.0, 5.0, 10.0, 14.0}) {
        const HopContext ctx(L, 1);
        for (double z : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0})
            EXPECT_NEAR(region_area(ctx, z), oracle::forwarding_area(L, z), 1e-10) << "L=" << L << " z=" << z;
    }
}

TEST(RegionArea, MatchesMonteCarlo) {
    const HopContext ctx(10.0, 1);
    for (double z : {0.0, 0.3, 0.7}) {
        const auto mc = monte_carlo_area(10.0, z, 10'000'000, 17 + static_cast<std::uint64_t>(z * 10));
        EXPECT_NEAR(region_area(ctx, z), mc.mean, 4.0 * mc.se) << "z=" << z;
    }
}

TEST(RegionArea, LargeDistanceApproachesHalfDisk) {
    EXPECT_NEAR(region_area(HopContext(1e4, 1), 0.0), std::numbers::pi / 2, 1e-3);
}

TEST(RegionArea, DomainErrors) {
    EXPECT_THROW(region_area(HopContext(1.0, 1), 0.0), DomainError);
    EXPECT_THROW(region_area(HopContext(0.5, 1), 0.2), DomainError);
    EXPECT_THROW(region_area(HopContext(5.0, 1), -0.1), DomainError);
    EXPECT_THROW(region_area(HopContext(5.0, 1), 1.1), DomainError);
    EXPECT_THROW(region_kernel(0.5, 0.5), NumericError);
}

TEST(ProgressModel, TablesMatchClosedForm) {
    for (double L : {1.2, 3.0, 10.0}) {
        const auto m = build_progress_model(HopContext(L, 1));
        const auto& g = m.grid();
        EXPECT_NEAR(m.area(), oracle::forwarding_area(L, 0.0), 1e-10);
        for (std::size_t i = 0; i < g.size(); i += 31) EXPECT_NEAR(m.tail()[i], oracle::tail(L, g[i]), 1e-9);
        EXPECT_DOUBLE_EQ(m.tail()[0], 1.0);
        EXPECT_EQ(m.tail()[g.size() - 1], 0.0);
        EXPECT_NEAR(m.normalization(), 1.0, 1e-6);
        EXPECT_NEAR(m.mean(), oracle::mean_progress(L), 2e-7) << "L=" << L;
    }
}

TEST(ProgressModel, TailIsAreaRatioAtEveryGridPoint) {
    const HopContext ctx(4.0, 1);
    const auto m = build_progress_model(ctx, 128);
    for (std::size_t i = 0; i < m.grid().size(); ++i)
        EXPECT_NEAR(m.tail()[i], region_area(ctx, m.grid()[i]) / m.area(), 1e-11);
}

TEST(ProgressModel, MonotoneTablesAcrossDistances) {
    for (double L = 1.01; L < 15.0; L *= 1.37) {
        const auto m = build_progress_model(HopContext(L, 1), 256);
        for (std::size_t i = 1; i < m.grid().size(); ++i) {
            ASSERT_LE(m.tail()[i], m.tail()[i - 1]) << "L=" << L;
            ASSERT_GE(m.cdf()[i], m.cdf()[i - 1]) << "L=" << L;
            ASSERT_GE(m.pdf()[i], 0.0);
        }
        EXPECT_EQ(m.cdf().front(), 0.0);
        EXPECT_EQ(m.cdf().back(), 1.0);
    }
}

TEST(ProgressModel, CdfAndTailAreComplementary) {
    const auto m = build_progress_model(HopContext(10.0, 1));
    for (std::size_t i = 0; i < m.grid().size(); ++i) EXPECT_NEAR(m.cdf()[i] + m.tail()[i], 1.0, 1e-9);
}

TEST(ProgressModel, PdfIsNegativeTailDerivative) {
    const double L = 6.0;
    const auto m = build_progress_model(HopContext(L, 1));
    const double h = 1e-5;
    for (double z : {0.05, 0.3, 0.6, 0.9}) {
        const double slope = (oracle::tail(L, z - h) - oracle::tail(L, z + h)) / (2 * h);
        EXPECT_NEAR(m.grid().interpolate(m.pdf(), z), slope, 2e-3 * slope) << "z=" << z;
    }
}

TEST(ProgressModel, TailIntegralIsExactForLinearTail) {
    const auto m = build_progress_model(HopContext(3.0, 1), 64);
    for (double z : {0.0, 0.013, 0.5, 0.77, 1.0}) {
        double s = 0.0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) s += m.tail_at(z + (1.0 - z) * (i + 0.5) / n);
        EXPECT_NEAR(m.tail_integral(z), s * (1.0 - z) / n, 1e-10);
    }
}

TEST(ProgressModel, RejectsTinyGrid) {
    EXPECT_THROW(build_progress_model(HopContext(3.0, 1), 16), DomainError);
    EXPECT_THROW(build_progress_model(HopContext(0.9, 1)), DomainError);
}

TEST(SampleProgress, KolmogorovSmirnovAgainstTable) {
    const auto m = build_progress_model(HopContext(10.0, 1));
    Stream rng(2024);
    std::vector<double> xs(1'000'000);
    for (double& x : xs) {
        x = sample_progress(m, rng);
        ASSERT_GE(x, 0.0);
        ASSERT_LE(x, 1.0);
    }
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = m.cdf_at(xs[i]);
        ks = std::max({ks, std::abs((i + 1) / n - f), std::abs(i / n - f)});
    }
    EXPECT_LE(ks, 0.002);
}

TEST(SampleProgress, QuantileInvertsCdf) {
    const auto m = build_progress_model(HopContext(2.0, 1));
    for (double q : {0.0, 0.01, 0.25, 0.5, 0.75, 0.99, 1.0}) EXPECT_NEAR(m.cdf_at(m.quantile(q)), q, 1e-12);
}
