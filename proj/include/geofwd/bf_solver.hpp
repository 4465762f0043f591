#pragma once

// Exact-model optimal relay selection (Best Forward).
//
// At stage k (the k-th forwarding-set node has just woken, elapsed time w, best
// progress so far b) the optimal rule stops iff b >= phi_k(w, b), where phi_K = 0 and
//
//   phi_k(w, b) = E[ max{b, Z, phi_{k+1}(w + U, max{b, Z})} - U / eta ],
//
// U ~ cond_interwake_pdf(K, k, w, .) and Z ~ progress law, independent.
// Each phi_k is stored on a uniform n_w x n_b grid over [0,1]^2 and read back by
// bilinear interpolation.

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "geofwd/csv.hpp"
#include "geofwd/decision.hpp"
#include "geofwd/error.hpp"
#include "geofwd/geometry.hpp"
#include "geofwd/quadrature.hpp"
#include "geofwd/wake_model.hpp"

namespace geofwd {

inline constexpr int kBfGridSide = 100;
inline constexpr std::size_t kBfProgressNodes = 256;
inline constexpr double kWeightSumTolerance = 1e-6;

class ThresholdSurface {
public:
    ThresholdSurface(int stages, double eta, int n_w, int n_b)
        : stages_(stages), eta_(eta), grid_w_(static_cast<std::size_t>(n_w)),
          grid_b_(static_cast<std::size_t>(n_b)),
          values_(static_cast<std::size_t>(stages) * n_w * n_b, 0.0) {
        if (stages < 1) throw DomainError("threshold surface: need K >= 1");
        if (!(eta > 0.0)) throw DomainError("threshold surface: eta must be positive");
        if (n_w < 2 || n_b < 2) throw DomainError("threshold surface: grids need >= 2 points");
    }

    int stages() const noexcept { return stages_; }
    double eta() const noexcept { return eta_; }
    const UnitGrid& grid_w() const noexcept { return grid_w_; }
    const UnitGrid& grid_b() const noexcept { return grid_b_; }

    /// phi_k over the grid, row-major in (w, b). k is 1-based.
    std::span<const double> slice(int k) const { return {values_.data() + offset(k), plane()}; }
    std::span<double> slice(int k) { return {values_.data() + offset(k), plane()}; }

    double at(int k, std::size_t iw, std::size_t ib) const {
        return values_[offset(k) + iw * grid_b_.size() + ib];
    }

    /// Bilinear interpolation of phi_k; (w, b) clamped to [0,1]^2.
    double phi(int k, double w, double b) const {
        const auto s = slice(k);
        const auto [i, tw] = grid_w_.locate(w);
        const auto [j, tb] = grid_b_.locate(b);
        const std::size_t nb = grid_b_.size();
        const double* r0 = s.data() + i * nb;
        const double* r1 = r0 + nb;
        const double lo = (1.0 - tb) * r0[j] + tb * r0[j + 1];
        const double hi = (1.0 - tb) * r1[j] + tb * r1[j + 1];
        return (1.0 - tw) * lo + tw * hi;
    }

private:
    std::size_t plane() const noexcept { return grid_w_.size() * grid_b_.size(); }
    std::size_t offset(int k) const {
        if (k < 1 || k > stages_) throw DomainError("threshold surface: stage out of range");
        return static_cast<std::size_t>(k - 1) * plane();
    }

    int stages_;
    double eta_;
    UnitGrid grid_w_;
    UnitGrid grid_b_;
    std::vector<double> values_;
};

namespace detail {

// Product-trapezoid weights for E[h(Z)] when h is known at nodes and Z follows the
// model's piecewise-linear tail: on [a, c] the integrand is replaced by its linear
// interpolant and integrated exactly against dF.
struct CellWeights {
    double left;
    double right;
};

inline CellWeights product_trapezoid(const ProgressModel& m, double a, double c) {
    if (!(c > a)) return {0.0, 0.0};
    const double ta = m.tail_at(a);
    const double tc = m.tail_at(c);
    const double avg = (m.tail_integral(a) - m.tail_integral(c)) / (c - a);
    return {ta - avg, avg - tc};
}

} // namespace detail

inline ThresholdSurface solve_bf(const HopContext& ctx, const ProgressModel& model, double eta,
                                 int n_w = kBfGridSide, int n_b = kBfGridSide) {
    const int K = ctx.nodes();
    if (K < 1) throw DomainError("solve_bf: need K >= 1");
    if (!(eta > 0.0)) throw DomainError("solve_bf: eta must be positive");
    ThresholdSurface surface(K, eta, n_w, n_b);
    const UnitGrid& gw = surface.grid_w();
    const UnitGrid& gb = surface.grid_b();
    const std::size_t nw = gw.size();
    const std::size_t nb = gb.size();

    // Progress nodes and the cell weights between them.
    const UnitGrid gz(kBfProgressNodes);
    const std::size_t nz = gz.size();
    std::vector<double> zeta(nz);
    for (std::size_t m = 0; m < nz; ++m) zeta[m] = gz[m];
    std::vector<detail::CellWeights> cells(nz - 1);
    for (std::size_t m = 0; m + 1 < nz; ++m) cells[m] = detail::product_trapezoid(model, zeta[m], zeta[m + 1]);

    // For each b: mass below b, the partial cell [b, next node], and where the suffix starts.
    struct BWeights {
        double below;
        detail::CellWeights partial;
        std::size_t next;
    };
    std::vector<BWeights> bw(nb);
    std::vector<double> suffix_mass(nz, 0.0);
    for (std::size_t m = nz - 1; m-- > 0;)
        suffix_mass[m] = suffix_mass[m + 1] + cells[m].left + cells[m].right;
    for (std::size_t ib = 0; ib < nb; ++ib) {
        const double b = gb[ib];
        auto [m, t] = gz.locate(b);
        const std::size_t next = m + 1;
        bw[ib] = {1.0 - model.tail_at(b), detail::product_trapezoid(model, b, zeta[next]), next};
        const double sum = bw[ib].below + bw[ib].partial.left + bw[ib].partial.right + suffix_mass[next];
        if (std::abs(sum - 1.0) > kWeightSumTolerance)
            throw ToleranceError("solve_bf: progress weights sum to " + std::to_string(sum));
    }

    const Rule& gauss = gauss_legendre01<64>();
    std::vector<double> row(nb), hz(nz), tail_sum(nz), acc(nb);
    std::vector<double> u_nodes, u_weights;

    for (int k = K - 1; k >= 1; --k) {
        const std::span<const double> next_phi = surface.slice(k + 1);
        const std::span<double> out = surface.slice(k);

        for (std::size_t iw = 0; iw < nw; ++iw) {
            const double w = gw[iw];
            u_nodes.clear();
            u_weights.clear();
            if (iw + 1 == nw) {
                // No time left: the gap law collapses onto zero.
                u_nodes.push_back(0.0);
                u_weights.push_back(1.0);
            } else {
                const double rest = 1.0 - w;
                double sum = 0.0;
                for (std::size_t q = 0; q < gauss.nodes.size(); ++q) {
                    const double u = rest * gauss.nodes[q];
                    const double wt = rest * gauss.weights[q] * cond_interwake_pdf(K, k, w, u);
                    u_nodes.push_back(u);
                    u_weights.push_back(wt);
                    sum += wt;
                }
                if (std::abs(sum - 1.0) > kWeightSumTolerance)
                    throw ToleranceError("solve_bf: gap weights sum to " + std::to_string(sum));
            }

            std::fill(acc.begin(), acc.end(), 0.0);
            for (std::size_t q = 0; q < u_nodes.size(); ++q) {
                const double w_next = std::min(1.0, w + u_nodes[q]);
                const auto [i, tw] = gw.locate(w_next);
                const double* r0 = next_phi.data() + i * nb;
                const double* r1 = r0 + nb;
                for (std::size_t j = 0; j < nb; ++j) row[j] = (1.0 - tw) * r0[j] + tw * r1[j];

                for (std::size_t m = 0; m < nz; ++m) hz[m] = std::max(zeta[m], gb.interpolate(row, zeta[m]));
                tail_sum[nz - 1] = 0.0;
                for (std::size_t m = nz - 1; m-- > 0;)
                    tail_sum[m] = tail_sum[m + 1] + cells[m].left * hz[m] + cells[m].right * hz[m + 1];

                const double delay = u_nodes[q] / eta;
                for (std::size_t ib = 0; ib < nb; ++ib) {
                    const double b = gb[ib];
                    const BWeights& bwi = bw[ib];
                    const double hb = std::max(b, row[ib]);
                    const double e = (bwi.below + bwi.partial.left) * hb +
                                     bwi.partial.right * hz[bwi.next] + tail_sum[bwi.next];
                    acc[ib] += u_weights[q] * (e - delay);
                }
            }
            std::copy(acc.begin(), acc.end(), out.begin() + static_cast<std::ptrdiff_t>(iw * nb));
        }
    }

    const double cap = 1.0 + 1.0 / eta;
    for (int k = 1; k <= K; ++k)
        for (double v : surface.slice(k))
            if (!std::isfinite(v) || !(v < cap))
                throw ToleranceError("solve_bf: threshold value out of range at stage " + std::to_string(k));
    return surface;
}

/// Stop iff b >= phi_k(w, b); the last stage always stops.
inline Action bf_decide(const ThresholdSurface& surface, int k, double w, double b) {
    if (k < 1 || k > surface.stages()) throw DomainError("bf_decide: stage out of range");
    if (k == surface.stages()) return Action::Stop;
    return b >= surface.phi(k, w, b) ? Action::Stop : Action::Continue;
}

/// CSV with header k,w,b,phi; one row per stage and grid point.
inline void write_surface_csv(std::ostream& os, const ThresholdSurface& s) {
    os << "k,w,b,phi\n";
    for (int k = 1; k <= s.stages(); ++k)
        for (std::size_t iw = 0; iw < s.grid_w().size(); ++iw)
            for (std::size_t ib = 0; ib < s.grid_b().size(); ++ib)
                csv::write_row(os, {std::to_string(k), csv::number(s.grid_w()[iw]),
                                    csv::number(s.grid_b()[ib]), csv::number(s.at(k, iw, ib))});
}

/// Reads a table written by write_surface_csv. Lines starting with '#' are skipped.
inline ThresholdSurface read_surface_csv(std::istream& is, double eta) {
    struct Entry {
        int k;
        double w, b, phi;
    };
    std::vector<Entry> rows;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        const auto t = csv::trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (!header) {
            if (t != "k,w,b,phi") throw ConfigError("surface csv: unexpected header '" + std::string(t) + "'");
            header = true;
            continue;
        }
        const auto f = csv::split(t);
        if (f.size() != 4) throw ConfigError("surface csv: expected 4 fields");
        rows.push_back({csv::parse<int>(f[0]), csv::parse<double>(f[1]), csv::parse<double>(f[2]),
                        csv::parse<double>(f[3])});
    }
    if (rows.empty()) throw ConfigError("surface csv: no rows");
    int K = 0;
    std::vector<double> ws, bs;
    for (const auto& r : rows) {
        K = std::max(K, r.k);
        if (r.k == 1) {
            if (ws.empty() || ws.back() != r.w) ws.push_back(r.w);
            if (ws.size() == 1) bs.push_back(r.b);
        }
    }
    const int n_w = static_cast<int>(ws.size());
    const int n_b = static_cast<int>(bs.size());
    if (rows.size() != static_cast<std::size_t>(K) * n_w * n_b)
        throw ConfigError("surface csv: row count does not match a full grid");
    ThresholdSurface s(K, eta, n_w, n_b);
    std::size_t idx = 0;
    for (int k = 1; k <= K; ++k) {
        auto sl = s.slice(k);
        for (double& v : sl) {
            if (rows[idx].k != k) throw ConfigError("surface csv: rows out of order");
            v = rows[idx++].phi;
        }
    }
    return s;
}

} // namespace geofwd
