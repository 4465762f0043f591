#pragma once

// One-hop averages of the threshold policy "forward to the first node with progress
// >= alpha, else to the best node once all K have woken", applied to the exact wake
// model. alpha = 0 is First Forward, alpha = 1 is Max Forward.

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "geofwd/csv.hpp"
#include "geofwd/error.hpp"
#include "geofwd/geometry.hpp"
#include "geofwd/quadrature.hpp"

namespace geofwd {

struct HopAverages {
    std::string policy;
    int K = 0;
    double alpha = 0.0;
    std::optional<double> eta;
    double mean_delay = 0.0;
    double mean_progress = 0.0;
};

namespace detail {
inline void check_alpha(int K, double alpha) {
    if (K < 1) throw DomainError("analytics: need K >= 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("analytics: alpha outside [0, 1]");
}
} // namespace detail

/// E[D] = sum_{k=1..K} C(K,k) p^k (1-p)^{K-k} / (k+1) + (1-p)^K K/(K+1), p = P(Z > alpha).
inline double sf_mean_delay(int K, double alpha, const ProgressModel& model) {
    detail::check_alpha(K, alpha);
    const double p = model.tail_at(alpha);
    const double q = 1.0 - p;
    double sum = 0.0;
    for (int k = 1; k <= K; ++k) {
        const double log_binom = std::lgamma(K + 1.0) - std::lgamma(k + 1.0) - std::lgamma(K - k + 1.0);
        sum += std::exp(log_binom) * std::pow(p, k) * std::pow(q, K - k) / (k + 1);
    }
    return sum + std::pow(q, K) * K / (K + 1.0);
}

/// Mean progress as a function of alpha for a fixed K and progress model.
///
/// P(Z^SF > z) is 1 - (1 - p_z)^K below alpha and (1 - (1 - p_alpha)^K) p_z / p_alpha
/// above it. The first piece is integrated cell by cell with Gauss-Legendre, exact for
/// the piecewise-linear tail whenever K <= 39; cumulative sums are cached so each
/// evaluation costs one partial cell.
class SfProgressCurve {
public:
    SfProgressCurve(int K, const ProgressModel& model) : K_(K), model_(&model) {
        if (K < 1) throw DomainError("analytics: need K >= 1");
        const UnitGrid& g = model.grid();
        cumulative_.assign(g.size(), 0.0);
        for (std::size_t j = 0; j + 1 < g.size(); ++j)
            cumulative_[j + 1] = cumulative_[j] + cell_integral(j, g[j + 1]);
    }

    int nodes() const noexcept { return K_; }

    double mean_progress(double alpha) const {
        detail::check_alpha(K_, alpha);
        // A lone node is always taken; the split below would only add rounding noise.
        if (K_ == 1) return model_->mean();
        const auto [j, t] = model_->grid().locate(alpha);
        const double below = t == 1.0 ? cumulative_[j + 1] : cumulative_[j] + cell_integral(j, alpha);
        const double p = model_->tail_at(alpha);
        if (p <= 0.0) return below;
        const double reach = 1.0 - std::pow(1.0 - p, K_);
        return below + reach / p * model_->tail_integral(alpha);
    }

    double mean_delay(double alpha) const { return sf_mean_delay(K_, alpha, *model_); }

private:
    // Integral of 1 - (1 - p_z)^K over [z_j, hi] with hi inside cell j.
    double cell_integral(std::size_t j, double hi) const {
        const UnitGrid& g = model_->grid();
        const auto tail = model_->tail();
        const double lo = g[j];
        if (!(hi > lo)) return 0.0;
        const double slope = (tail[j + 1] - tail[j]) / (g[j + 1] - lo);
        const Rule& rule = gauss_legendre01<20>();
        double s = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double z = lo + (hi - lo) * rule.nodes[i];
            const double p = tail[j] + slope * (z - lo);
            s += rule.weights[i] * (1.0 - std::pow(1.0 - p, K_));
        }
        return (hi - lo) * s;
    }

    int K_;
    const ProgressModel* model_;
    std::vector<double> cumulative_;
};

inline double sf_mean_progress(int K, double alpha, const ProgressModel& model) {
    return SfProgressCurve(K, model).mean_progress(alpha);
}

inline HopAverages sf_averages(int K, double alpha, const ProgressModel& model) {
    return {"sf", K, alpha, std::nullopt, sf_mean_delay(K, alpha, model), sf_mean_progress(K, alpha, model)};
}

inline HopAverages ff_averages(int K, const ProgressModel& model) {
    auto a = sf_averages(K, 0.0, model);
    a.policy = "ff";
    return a;
}

inline HopAverages mf_averages(int K, const ProgressModel& model) {
    auto a = sf_averages(K, 1.0, model);
    a.policy = "mf";
    return a;
}

inline void write_averages_header(std::ostream& os) {
    os << "policy,K,L_i,alpha,eta,mean_delay,mean_progress\n";
}

inline void write_averages_row(std::ostream& os, const HopAverages& a, double distance) {
    csv::write_row(os, {a.policy, csv::number(a.K), csv::number(distance), csv::number(a.alpha),
                        a.eta ? csv::number(*a.eta) : std::string(), csv::number(a.mean_delay),
                        csv::number(a.mean_progress)});
}

} // namespace geofwd
