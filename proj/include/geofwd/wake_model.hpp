#pragma once

// Asynchronous periodic wake process. With T = 1, the wake instants of the K
// forwarding-set nodes measured from the moment the relay gets the packet are
// the order statistics of K i.i.d. Uniform[0,1] variables.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "geofwd/error.hpp"
#include "geofwd/random.hpp"

namespace geofwd {

/// Time from t until the next wake of a node with phase `phase` and period `period`.
inline double waiting_time(double t, double phase, double period) {
    if (!(period > 0.0)) throw DomainError("waiting_time: period must be positive");
    if (!(phase >= 0.0 && phase < period))
        throw DomainError("waiting_time: phase must lie in [0, period)");
    if (!(t >= 0.0)) throw DomainError("waiting_time: time must be nonnegative");
    const double lag = t - phase;
    if (lag <= 0.0) return -lag;
    const double into_cycle = std::fmod(lag, period);
    return into_cycle == 0.0 ? 0.0 : period - into_cycle;
}

/// Sorted wake instants W_1 <= ... <= W_K and inter-wake gaps U_k = W_k - W_{k-1} (W_0 = 0).
struct WakeSequence {
    std::vector<double> w;
    std::vector<double> u;

    int size() const noexcept { return static_cast<int>(w.size()); }
};

/// Fills `out` with the sorted wake instants of K nodes; reuses its storage.
inline void sample_wake_instants(int K, Stream& rng, std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(K));
    for (double& x : out) x = rng.uniform();
    std::sort(out.begin(), out.end());
}

inline WakeSequence sample_wakes(int K, Stream& rng) {
    if (K < 1) throw DomainError("sample_wakes: need K >= 1");
    WakeSequence s;
    sample_wake_instants(K, rng, s.w);
    s.u.resize(s.w.size());
    double prev = 0.0;
    for (std::size_t k = 0; k < s.w.size(); ++k) {
        s.u[k] = s.w[k] - prev;
        prev = s.w[k];
    }
    return s;
}

/// log of K! / ((k-1)! (K-k)!)
inline double log_order_stat_coefficient(int K, int k) {
    return std::lgamma(K + 1.0) - std::lgamma(static_cast<double>(k)) - std::lgamma(K - k + 1.0);
}

/// Density of the k-th smallest of K Uniform[0,1] variables.
inline double order_stat_pdf(int K, int k, double u) {
    if (k < 1 || k > K) throw DomainError("order_stat_pdf: need 1 <= k <= K");
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("order_stat_pdf: u outside [0, 1]");
    return std::exp(log_order_stat_coefficient(K, k)) * std::pow(u, k - 1) * std::pow(1.0 - u, K - k);
}

namespace detail {
inline void check_interwake_args(int K, int k, double w) {
    if (k < 1 || k > K - 1) throw DomainError("inter-wake law: need 1 <= k <= K-1");
    if (!(w >= 0.0 && w < 1.0)) throw DomainError("inter-wake law: elapsed time outside [0, 1)");
}
} // namespace detail

/// Density of U_{k+1} given W_k = w: (K-k) (1-w-u)^{K-k-1} / (1-w)^{K-k} on [0, 1-w].
inline double cond_interwake_pdf(int K, int k, double w, double u) {
    detail::check_interwake_args(K, k, w);
    const double rest = 1.0 - w;
    if (!(u >= 0.0 && u <= rest)) throw DomainError("cond_interwake_pdf: gap outside [0, 1-w]");
    const int m = K - k;
    return m * std::pow(rest - u, m - 1) / std::pow(rest, m);
}

/// E[U_{k+1} | W_k = w] = (1-w) / (K-k+1).
inline double cond_interwake_mean(int K, int k, double w) {
    detail::check_interwake_args(K, k, w);
    return (1.0 - w) / (K - k + 1);
}

} // namespace geofwd
