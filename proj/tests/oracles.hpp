#pragma once

// Independent reference computations for the tests. Nothing here calls into the
// library's quadrature or tabulation code.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

/// Area of the intersection of two disks with radii r and R whose centers are d apart.
inline double lens_area(double r, double R, double d) {
    if (d >= r + R) return 0.0;
    if (d <= std::abs(R - r)) return std::numbers::pi * std::min(r, R) * std::min(r, R);
    const double a = r * r * std::acos((d * d + r * r - R * R) / (2.0 * d * r));
    const double b = R * R * std::acos((d * d + R * R - r * r) / (2.0 * d * R));
    const double c = 0.5 * std::sqrt((-d + r + R) * (d + r - R) * (d - r + R) * (d + r + R));
    return a + b - c;
}

/// Points within 1 of the relay and within L - z of a sink at distance L.
inline double forwarding_area(double L, double z) { return lens_area(1.0, L - z, L); }

inline double tail(double L, double z) { return forwarding_area(L, z) / forwarding_area(L, 0.0); }

/// Plain midpoint rule.
inline double midpoint(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
    return s * h;
}

/// E[Z] = integral of the closed-form tail.
inline double mean_progress(double L, int n = 200000) {
    return midpoint([L](double z) { return tail(L, z); }, 0.0, 1.0, n);
}

/// K! / ((k-1)! (K-k)!) by exact integer arithmetic (K <= 20 fits in 64 bits).
inline unsigned long long order_stat_coefficient(int K, int k) {
    unsigned long long c = 1;
    // K * C(K-1, k-1)
    for (int i = 1; i <= k - 1; ++i) c = c * static_cast<unsigned long long>(K - i) / i;
    return c * static_cast<unsigned long long>(K);
}

} // namespace oracle
