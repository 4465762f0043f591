#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "geofwd/random.hpp"
#include "geofwd/wake_model.hpp"
#include "oracles.hpp"

using namespace geofwd;

TEST(WaitingTime, PeriodicAndBounded) {
    // Dyadic values are exact in binary, so periodicity holds bit for bit.
    for (double t : {0.0, 0.25, 0.5, 0.875, 3.125})
        for (double phase : {0.0, 0.125, 0.5, 0.75}) {
            const double w = waiting_time(t, phase, 1.0);
            EXPECT_GE(w, 0.0);
            EXPECT_LT(w, 1.0);
            EXPECT_EQ(waiting_time(t + 1.0, phase, 1.0), w);
            EXPECT_EQ(waiting_time(t + 4.0, phase, 1.0), w);
        }
    Stream rng(5);
    for (int i = 0; i < 10000; ++i) {
        const double period = 0.5 + rng.uniform();
        const double phase = period * rng.uniform();
        const double t = 10.0 * rng.uniform();
        const double w = waiting_time(t, phase, period);
        ASSERT_GE(w, 0.0);
        ASSERT_LT(w, period);
        // t + w is a wake instant of the node.
        const double cycles = (t + w - phase) / period;
        ASSERT_NEAR(cycles, std::round(cycles), 1e-12);
        ASSERT_NEAR(waiting_time(t + period, phase, period), w, 1e-12);
    }
}

TEST(WaitingTime, Examples) {
    EXPECT_DOUBLE_EQ(waiting_time(0.0, 0.3, 1.0), 0.3);
    EXPECT_DOUBLE_EQ(waiting_time(0.5, 0.25, 1.0), 0.75);
    EXPECT_EQ(waiting_time(0.25, 0.25, 1.0), 0.0);
    EXPECT_THROW(waiting_time(0.0, 1.0, 1.0), DomainError);
    EXPECT_THROW(waiting_time(-1.0, 0.0, 1.0), DomainError);
    EXPECT_THROW(waiting_time(0.0, 0.0, 0.0), DomainError);
}

TEST(SampleWakes, SortedWithConsistentGaps) {
    Stream rng(9);
    for (int K : {1, 2, 5, 15}) {
        const auto s = sample_wakes(K, rng);
        ASSERT_EQ(s.size(), K);
        double sum = 0.0;
        for (int k = 0; k < K; ++k) {
            EXPECT_GE(s.u[k], 0.0);
            sum += s.u[k];
            EXPECT_DOUBLE_EQ(sum, s.w[k]);
            if (k > 0) { EXPECT_LE(s.w[k - 1], s.w[k]); }
        }
        EXPECT_LE(s.w.back(), 1.0);
    }
    EXPECT_THROW(sample_wakes(0, rng), DomainError);
}

TEST(SampleWakes, OrderStatisticMeans) {
    // E[W_k] = k / (K + 1), Var[W_k] = k (K - k + 1) / ((K + 1)^2 (K + 2)).
    const int K = 5;
    const int n = 400000;
    std::vector<double> sum(K, 0.0);
    Stream rng(31);
    for (int i = 0; i < n; ++i) {
        const auto s = sample_wakes(K, rng);
        for (int k = 0; k < K; ++k) sum[k] += s.w[k];
    }
    for (int k = 1; k <= K; ++k) {
        const double var = k * (K - k + 1.0) / ((K + 1.0) * (K + 1.0) * (K + 2.0));
        EXPECT_NEAR(sum[k - 1] / n, k / (K + 1.0), 4.0 * std::sqrt(var / n)) << "k=" << k;
    }
}

TEST(SampleWakes, FirstWakeChiSquare) {
    // W_1 has cdf 1 - (1 - w)^K; bin by equal-probability cells.
    const int K = 3;
    const int bins = 20;
    const int n = 200000;
    std::vector<int> count(bins, 0);
    Stream rng(77);
    for (int i = 0; i < n; ++i) {
        const double w = sample_wakes(K, rng).w[0];
        const double F = 1.0 - std::pow(1.0 - w, K);
        ++count[std::min(bins - 1, static_cast<int>(F * bins))];
    }
    double chi2 = 0.0;
    const double expected = static_cast<double>(n) / bins;
    for (int c : count) chi2 += (c - expected) * (c - expected) / expected;
    // 19 degrees of freedom; 0.1% critical value is 43.82.
    EXPECT_LT(chi2, 43.82);
}

TEST(OrderStatistics, CoefficientMatchesExactFactorials) {
    for (int K = 1; K <= 20; ++K)
        for (int k = 1; k <= K; ++k) {
            const double exact = static_cast<double>(oracle::order_stat_coefficient(K, k));
            EXPECT_NEAR(std::exp(log_order_stat_coefficient(K, k)), exact, exact * 1e-12) << K << ',' << k;
        }
}

TEST(OrderStatistics, DensityIntegratesToOneWithMeanKOverKPlusOne) {
    for (int K : {1, 3, 8})
        for (int k = 1; k <= K; ++k) {
            const double mass = oracle::midpoint([&](double u) { return order_stat_pdf(K, k, u); }, 0, 1, 20000);
            const double mean =
                oracle::midpoint([&](double u) { return u * order_stat_pdf(K, k, u); }, 0, 1, 20000);
            EXPECT_NEAR(mass, 1.0, 1e-7);
            EXPECT_NEAR(mean, k / (K + 1.0), 1e-7);
        }
    EXPECT_THROW(order_stat_pdf(3, 4, 0.5), DomainError);
    EXPECT_THROW(order_stat_pdf(3, 1, 1.5), DomainError);
}

TEST(InterWake, ConditionalLawIntegratesAndHasClosedFormMean) {
    for (int K : {2, 5, 9})
        for (int k = 1; k < K; ++k)
            for (double w : {0.0, 0.3, 0.9}) {
                const double rest = 1.0 - w;
                const double mass =
                    oracle::midpoint([&](double u) { return cond_interwake_pdf(K, k, w, u); }, 0, rest, 20000);
                const double mean = oracle::midpoint(
                    [&](double u) { return u * cond_interwake_pdf(K, k, w, u); }, 0, rest, 20000);
                EXPECT_NEAR(mass, 1.0, 1e-7);
                EXPECT_NEAR(mean, cond_interwake_mean(K, k, w), 1e-7);
            }
    EXPECT_THROW(cond_interwake_pdf(3, 3, 0.2, 0.1), DomainError);
    EXPECT_THROW(cond_interwake_pdf(3, 1, 0.8, 0.3), DomainError);
}

TEST(InterWake, MeanMatchesSimulatedConditionalGap) {
    // Given W_k near w, the mean gap to W_{k+1}.
    const int K = 5, k = 2;
    const double w = 0.4, half = 0.01;
    Stream rng(3);
    double sum = 0.0, sq = 0.0;
    int hits = 0;
    while (hits < 20000) {
        const auto s = sample_wakes(K, rng);
        if (std::abs(s.w[k - 1] - w) > half) continue;
        ++hits;
        sum += s.u[k];
        sq += s.u[k] * s.u[k];
    }
    const double mean = sum / hits;
    const double se = std::sqrt((sq / hits - mean * mean) / hits);
    EXPECT_NEAR(mean, cond_interwake_mean(K, k, w), 4.0 * se + 0.005);
}

TEST(Stream, DerivedStreamsAreReproducible) {
    Stream a(42, 7), b(42, 7), c(42, 8);
    for (int i = 0; i < 10; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        EXPECT_NE(x, c());
    }
    Stream u(1);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.uniform();
        ASSERT_GE(v, 0.0);
        ASSERT_LT(v, 1.0);
    }
}
