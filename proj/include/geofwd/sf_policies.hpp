#pragma once

// Simplified Forward and the two extremal policies.
//
// Under i.i.d. Exponential(K) gaps the optimal rule is one-step look-ahead: stop as soon
// as the best progress b reaches the fixed point alpha of
//
//   beta_1(b) = E[max{b, Z}] - 1/(eta K) = b + int_b^1 P(Z > z) dz - 1/(eta K).
//
// beta_1 is increasing and convex with beta_1(1) < 1, so the fixed point is unique when
// beta_1(0) >= 0, and alpha = 0 (First Forward) otherwise.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "geofwd/analytics.hpp"
#include "geofwd/decision.hpp"
#include "geofwd/error.hpp"
#include "geofwd/geometry.hpp"

namespace geofwd {

inline constexpr double kFixedPointTolerance = 1e-9;
inline constexpr double kCalibrationTolerance = 1e-6;
inline constexpr int kMaxBisections = 200;

struct SfThreshold {
    double alpha = 0.0;
    /// Multiplier the threshold was solved for; empty when calibrated to a progress target.
    std::optional<double> eta;
    int K = 1;
    /// Multiplier at or below which the threshold collapses to zero: 1 / (E[Z] K).
    double eta_o = 0.0;

    /// alpha = 1 encodes "wait for every node" (Max Forward).
    bool waits_for_all() const noexcept { return alpha >= 1.0; }
};

inline double sf_cutoff_eta(int K, const ProgressModel& model) { return 1.0 / (model.mean() * K); }

inline double beta1(double b, int K, double eta, const ProgressModel& model) {
    if (!(b >= 0.0 && b <= 1.0)) throw DomainError("beta1: b outside [0, 1]");
    if (K < 1 || !(eta > 0.0)) throw DomainError("beta1: need K >= 1 and eta > 0");
    return b + model.tail_integral(b) - 1.0 / (eta * K);
}

inline SfThreshold solve_alpha(int K, double eta, const ProgressModel& model) {
    if (K < 1 || !(eta > 0.0)) throw DomainError("solve_alpha: need K >= 1 and eta > 0");
    SfThreshold th{0.0, eta, K, sf_cutoff_eta(K, model)};
    if (eta <= th.eta_o || beta1(0.0, K, eta, model) <= 0.0) return th;

    auto gap = [&](double b) { return b - beta1(b, K, eta, model); };
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < kMaxBisections; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g = gap(mid);
        if (std::abs(g) <= kFixedPointTolerance || hi - lo <= 4 * std::numeric_limits<double>::epsilon()) {
            th.alpha = mid;
            return th;
        }
        (g < 0.0 ? lo : hi) = mid;
    }
    throw ConvergenceError("solve_alpha: bisection did not converge (K=" + std::to_string(K) +
                           ", eta=" + std::to_string(eta) + ")");
}

/// beta tabulated on the progress model's grid.
using BetaTable = std::vector<double>;

inline BetaTable beta1_table(int K, double eta, const ProgressModel& model) {
    const UnitGrid& g = model.grid();
    BetaTable t(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) t[i] = beta1(g[i], K, eta, model);
    return t;
}

/// beta_{j+1}(b) = E[max{b, Z, beta_j(max{b, Z})}] - 1/(eta K), on the model grid.
inline BetaTable beta_next(const BetaTable& prev, int K, double eta, const ProgressModel& model) {
    const UnitGrid& g = model.grid();
    if (prev.size() != g.size()) throw DomainError("beta_next: table does not match the model grid");
    if (K < 1 || !(eta > 0.0)) throw DomainError("beta_next: need K >= 1 and eta > 0");
    const auto tail = model.tail();
    const std::size_t n = g.size();

    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = std::max(g[i], prev[i]);
    // With a linear tail the law of Z has constant density on each cell; the product
    // trapezoid splits the cell mass evenly between its endpoints.
    std::vector<double> above(n, 0.0);
    for (std::size_t i = n - 1; i-- > 0;)
        above[i] = above[i + 1] + 0.5 * (tail[i] - tail[i + 1]) * (h[i] + h[i + 1]);

    BetaTable next(n);
    const double cost = 1.0 / (eta * K);
    for (std::size_t i = 0; i < n; ++i) next[i] = (1.0 - tail[i]) * h[i] + above[i] - cost;
    return next;
}

inline Action sf_decide(const SfThreshold& th, int k, double b) {
    if (k < 1 || k > th.K) throw DomainError("sf_decide: stage out of range");
    return (k == th.K || b >= th.alpha) ? Action::Stop : Action::Continue;
}

inline Action ff_decide(int k) {
    if (k < 1) throw DomainError("ff_decide: stage out of range");
    return k == 1 ? Action::Stop : Action::Continue;
}

inline Action mf_decide(int k, int K) {
    if (k < 1 || k > K) throw DomainError("mf_decide: stage out of range");
    return k == K ? Action::Stop : Action::Continue;
}

/// Threshold whose exact-model mean progress equals gamma; First Forward below its
/// mean progress, Max Forward (alpha = 1) at or above the Max Forward mean.
inline SfThreshold calibrate_threshold(double gamma, int K, const ProgressModel& model) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("calibrate_threshold: gamma outside [0, 1]");
    if (K < 1) throw DomainError("calibrate_threshold: need K >= 1");
    SfThreshold th{0.0, std::nullopt, K, sf_cutoff_eta(K, model)};
    const SfProgressCurve curve(K, model);
    if (gamma <= curve.mean_progress(0.0)) return th;
    if (gamma >= curve.mean_progress(1.0)) {
        th.alpha = 1.0;
        return th;
    }
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < kMaxBisections; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double e = curve.mean_progress(mid);
        if (std::abs(e - gamma) <= kCalibrationTolerance) {
            th.alpha = mid;
            return th;
        }
        (e < gamma ? lo : hi) = mid;
    }
    throw ConvergenceError("calibrate_threshold: bisection did not converge (gamma=" +
                           std::to_string(gamma) + ")");
}

} // namespace geofwd
