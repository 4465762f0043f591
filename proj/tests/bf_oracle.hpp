#pragma once

#include <algorithm>
#include <vector>

#include "oracles.hpp"

namespace oracle {

// Brute-force continuation values for K = 3 built only from the closed-form tail.
class NestedBf {
public:
    NestedBf(double L, double eta, int n) : eta_(eta), n_(n), z_(n), mass_(n), above_(n + 1, 0.0) {
        const double h = 1.0 / n;
        std::vector<double> edge(n + 1);
        for (int j = 0; j <= n; ++j) edge[j] = tail(L, j * h);
        for (int j = 0; j < n; ++j) {
            z_[j] = (j + 0.5) * h;
            mass_[j] = edge[j] - edge[j + 1];
        }
        // Simpson per cell for the integral of the tail above each edge.
        for (int j = n - 1; j >= 0; --j)
            above_[j] = above_[j + 1] + h / 6.0 * (edge[j] + 4.0 * tail(L, z_[j]) + edge[j + 1]);
        L_ = L;
    }

    // E[max(b, Z)] = b + integral_b^1 tail.
    double expected_max(double b) const {
        const double h = 1.0 / n_;
        const int j = std::min(n_ - 1, static_cast<int>(b / h));
        const double hi = (j + 1) * h;
        const double mid = 0.5 * (b + hi);
        const double part = (hi - b) / 6.0 * (tail(L_, b) + 4.0 * tail(L_, mid) + tail(L_, hi));
        return b + part + above_[j + 1];
    }

    double phi2(double w, double b) const { return expected_max(b) - (1.0 - w) / (2.0 * eta_); }

    // phi_1(w, b) = E[max(b', phi_2(w + U, b')) - U / eta], b' = max(b, Z), U ~ 2 (1-w-u) / (1-w)^2.
    double phi1(double w, double b) const {
        const double rest = 1.0 - w;
        const double hu = rest / n_;
        std::vector<double> g(n_);
        for (int j = 0; j < n_; ++j) g[j] = expected_max(std::max(b, z_[j]));
        double total = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double u = (i + 0.5) * hu;
            const double pu = 2.0 * (rest - u) / (rest * rest) * hu;
            const double delay = (1.0 - w - u) / (2.0 * eta_);
            double inner = 0.0;
            for (int j = 0; j < n_; ++j) {
                inner += mass_[j] * std::max(std::max(b, z_[j]), g[j] - delay);
            }
            total += pu * (inner - u / eta_);
        }
        return total;
    }

private:
    double eta_;
    int n_;
    double L_ = 0.0;
    std::vector<double> z_, mass_, above_;
};

} // namespace oracle
