#pragma once

// Geometry of a relay's forwarding region.
//
// All lengths are in units of the communication radius r_c. For a relay at
// distance L from the sink, S(z) is the set of points within r_c of the relay
// that are closer to the sink by more than z, and the progress Z of a node
// placed uniformly in S(0) has density |S(0)|^-1 * kernel(L, z).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "geofwd/error.hpp"
#include "geofwd/quadrature.hpp"
#include "geofwd/random.hpp"

namespace geofwd {

inline constexpr int kAreaPanels = 4096;
inline constexpr std::size_t kDefaultProgressGrid = 1024;
inline constexpr double kArccosSlack = 1e-12;
inline constexpr double kNormalizationTolerance = 1e-6;

/// One relay's view of the forwarding problem, normalized so that r_c = 1 and T = 1.
class HopContext {
public:
    HopContext(double distance, int nodes) : distance_(distance), nodes_(nodes) {
        if (!(distance > 0.0) || !std::isfinite(distance))
            throw DomainError("hop context: distance to sink must be positive, got " +
                              std::to_string(distance));
        if (nodes < 0) throw DomainError("hop context: node count must be nonnegative");
    }

    /// Rescales a raw distance given in the same unit as `radius`.
    static HopContext from_raw(double distance, double radius, int nodes) {
        if (!(radius > 0.0)) throw DomainError("hop context: radius must be positive");
        return HopContext(distance / radius, nodes);
    }

    double distance() const noexcept { return distance_; }
    int nodes() const noexcept { return nodes_; }
    static constexpr double radius() noexcept { return 1.0; }
    static constexpr double period() noexcept { return 1.0; }

    /// L <= r_c: the relay waits for the sink instead of choosing a forwarder.
    bool reaches_sink() const noexcept { return distance_ <= 1.0; }

    HopContext with_nodes(int nodes) const { return HopContext(distance_, nodes); }

private:
    double distance_;
    int nodes_;
};

/// Integrand of the forwarding-area integral: 2(L-u) * arccos((L^2 + (L-u)^2 - 1) / (2L(L-u))).
///
/// Evaluated through 1 - arg = (1 - u^2) / (2L(L-u)) and arccos(1 - x) = 2 asin(sqrt(x/2)),
/// which keeps full precision when the argument is close to 1.
inline double region_kernel(double distance, double u) {
    const double d = distance - u;
    if (!(d > 0.0)) throw NumericError("region kernel: offset reaches the relay-sink distance");
    double x = (1.0 - u * u) / (2.0 * distance * d);
    if (x < -kArccosSlack || x > 2.0 + kArccosSlack || !std::isfinite(x))
        throw NumericError("region kernel: arccos argument " + std::to_string(1.0 - x) +
                           " outside [-1, 1] (bad distance " + std::to_string(distance) + ")");
    x = std::clamp(x, 0.0, 2.0);
    return 4.0 * d * std::asin(std::sqrt(0.5 * x));
}

namespace detail {

inline void require_relay_geometry(const HopContext& ctx) {
    if (ctx.reaches_sink())
        throw DomainError("forwarding region requires L_i > r_c, got L_i = " +
                          std::to_string(ctx.distance()));
}

// Integral of the kernel over [lo, hi] after substituting u = 1 - s^2, which turns the
// square-root behaviour at u = 1 into a smooth integrand.
template <class Quad>
double kernel_integral(double distance, double lo, double hi, Quad&& quad) {
    const double s_hi = std::sqrt(std::max(0.0, 1.0 - lo));
    const double s_lo = std::sqrt(std::max(0.0, 1.0 - hi));
    return quad([distance](double s) { return 2.0 * s * region_kernel(distance, 1.0 - s * s); },
                s_lo, s_hi);
}

} // namespace detail

/// |S(z)|: area of the part of the forwarding region with progress above z.
inline double region_area(const HopContext& ctx, double z) {
    if (!(z >= 0.0 && z <= 1.0))
        throw DomainError("region_area: offset must lie in [0, 1], got " + std::to_string(z));
    detail::require_relay_geometry(ctx);
    return detail::kernel_integral(ctx.distance(), z, 1.0, [](auto&& f, double a, double b) {
        return simpson(f, a, b, kAreaPanels);
    });
}

/// Tabulated law of the progress Z of a uniformly placed forwarding-set node.
///
/// `tail` is the area ratio |S(z)|/|S(0)| at every grid point; `cdf` is an independent
/// cumulative quadrature of `pdf`, renormalized so that its last value is exactly 1.
/// Expectations elsewhere in the library treat the linear interpolant of `tail` as the
/// law of Z.
class ProgressModel {
public:
    const HopContext& context() const noexcept { return ctx_; }
    double area() const noexcept { return area_; }
    double normalization() const noexcept { return normalization_; }
    const UnitGrid& grid() const noexcept { return grid_; }
    std::span<const double> pdf() const noexcept { return pdf_; }
    std::span<const double> cdf() const noexcept { return cdf_; }
    std::span<const double> tail() const noexcept { return tail_; }

    double tail_at(double z) const noexcept { return grid_.interpolate(tail_, z); }
    double cdf_at(double z) const noexcept { return grid_.interpolate(cdf_, z); }

    /// Integral of the interpolated tail over [z, 1]; E[max{b, Z}] = b + tail_integral(b).
    double tail_integral(double z) const noexcept {
        const auto [i, t] = grid_.locate(z);
        const double right = tail_[i + 1];
        const double width = (1.0 - t) * grid_.step();
        return tail_cumulative_[i + 1] + 0.5 * width * (tail_at(z) + right);
    }

    /// E[Z] = integral of the tail over [0, 1].
    double mean() const noexcept { return tail_cumulative_[0]; }

    /// Inverse of the tabulated cdf, linear between grid points.
    double quantile(double q) const noexcept {
        if (q <= 0.0) return 0.0;
        if (q >= 1.0) return 1.0;
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), q);
        const auto j = static_cast<std::size_t>(it - cdf_.begin());
        const double c0 = cdf_[j - 1];
        const double c1 = cdf_[j];
        const double frac = c1 > c0 ? (q - c0) / (c1 - c0) : 0.0;
        return grid_[j - 1] + frac * (grid_[j] - grid_[j - 1]);
    }

private:
    friend ProgressModel build_progress_model(const HopContext&, std::size_t);

    ProgressModel(const HopContext& ctx, std::size_t n) : ctx_(ctx), grid_(n) {}

    HopContext ctx_;
    UnitGrid grid_;
    double area_ = 0.0;
    double normalization_ = 1.0;
    std::vector<double> pdf_;
    std::vector<double> cdf_;
    std::vector<double> tail_;
    std::vector<double> tail_cumulative_;
};

inline ProgressModel build_progress_model(const HopContext& ctx,
                                          std::size_t n_grid = kDefaultProgressGrid) {
    if (n_grid < 64) throw DomainError("build_progress_model: grid needs at least 64 points");
    detail::require_relay_geometry(ctx);

    ProgressModel m(ctx, n_grid);
    const UnitGrid& g = m.grid_;
    const double L = ctx.distance();
    m.area_ = region_area(ctx, 0.0);

    // Tail areas accumulate cell by cell from z = 1, each cell by composite Simpson.
    const int cell_panels = std::max(2, 2 * ((kAreaPanels / static_cast<int>(n_grid - 1) + 1) / 2));
    m.pdf_.resize(n_grid);
    m.tail_.resize(n_grid);
    double above = 0.0;
    m.tail_[n_grid - 1] = 0.0;
    for (std::size_t i = n_grid - 1; i-- > 0;) {
        above += detail::kernel_integral(L, g[i], g[i + 1], [cell_panels](auto&& f, double a, double b) {
            return simpson(f, a, b, cell_panels);
        });
        m.tail_[i] = above / m.area_;
    }
    if (std::abs(m.tail_[0] - 1.0) > kNormalizationTolerance)
        throw ToleranceError("build_progress_model: cell areas add up to " + std::to_string(m.tail_[0]) +
                             " of the region");
    m.tail_[0] = 1.0;
    for (std::size_t i = 0; i < n_grid; ++i) m.pdf_[i] = region_kernel(L, g[i]) / m.area_;
    for (std::size_t i = 1; i < n_grid; ++i) {
        if (m.tail_[i] > m.tail_[i - 1])
            throw ToleranceError("build_progress_model: tail not monotone at z = " +
                                 std::to_string(g[i]));
    }

    // Cell-wise Gauss-Legendre in the same substituted variable as region_area.
    const Rule& rule = gauss_legendre01<20>();
    auto cell_quad = [&rule](auto&& f, double a, double b) {
        double s = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q)
            s += rule.weights[q] * f(a + (b - a) * rule.nodes[q]);
        return (b - a) * s;
    };
    m.cdf_.assign(n_grid, 0.0);
    for (std::size_t i = 1; i < n_grid; ++i)
        m.cdf_[i] = m.cdf_[i - 1] + detail::kernel_integral(L, g[i - 1], g[i], cell_quad) / m.area_;
    const double total = m.cdf_.back();
    if (std::abs(total - 1.0) > kNormalizationTolerance)
        throw ToleranceError("build_progress_model: density integrates to " +
                             std::to_string(total));
    m.normalization_ = total;
    for (double& c : m.cdf_) c /= total;
    m.cdf_.back() = 1.0;

    m.tail_cumulative_.assign(n_grid, 0.0);
    for (std::size_t i = n_grid - 1; i-- > 0;)
        m.tail_cumulative_[i] =
            m.tail_cumulative_[i + 1] + 0.5 * g.step() * (m.tail_[i] + m.tail_[i + 1]);
    return m;
}

/// Inverse-cdf draw of one progress value.
inline double sample_progress(const ProgressModel& model, Stream& rng) {
    return model.quantile(rng.uniform());
}

} // namespace geofwd
