#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace geofwd {

struct Summary {
    double mean = 0.0;
    double se = 0.0;
    std::size_t count = 0;
};

/// Sample mean and standard error (sample stddev / sqrt(n)); two passes in index order.
inline Summary summarize(std::span<const double> xs) {
    Summary s;
    s.count = xs.size();
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) return s;
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    return s;
}

/// Average ranks (ties share the mean rank), 1-based.
inline std::vector<double> ranks(std::span<const double> xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
    std::vector<double> r(xs.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
        i = j + 1;
    }
    return r;
}

struct RankCorrelation {
    double rho = 0.0;
    /// One-sided p-value for the sign of rho (t approximation with n-2 dof).
    double p_value = 1.0;
};

inline RankCorrelation spearman(std::span<const double> x, std::span<const double> y) {
    RankCorrelation out;
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 3) return out;
    const auto rx = ranks(x.first(n));
    const auto ry = ranks(y.first(n));
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return out;
    out.rho = sxy / std::sqrt(sxx * syy);
    const double dof = static_cast<double>(n - 2);
    if (std::abs(out.rho) >= 1.0) {
        out.p_value = 0.0;
        return out;
    }
    const double t = std::abs(out.rho) * std::sqrt(dof / (1.0 - out.rho * out.rho));
    boost::math::students_t dist(dof);
    out.p_value = boost::math::cdf(boost::math::complement(dist, t));
    return out;
}

} // namespace geofwd
