#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace geofwd {

/// Nodes and weights of a quadrature rule on [0, 1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

template <unsigned N>
Rule make_gauss_legendre01() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    // boost stores the nonnegative half; x[0] == 0 when N is odd.
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < x.size(); ++i) {
        pts.emplace_back(0.5 * (1.0 + x[i]), 0.5 * w[i]);
        if (x[i] != 0.0) pts.emplace_back(0.5 * (1.0 - x[i]), 0.5 * w[i]);
    }
    std::sort(pts.begin(), pts.end());
    Rule r;
    for (const auto& [node, weight] : pts) {
        r.nodes.push_back(node);
        r.weights.push_back(weight);
    }
    return r;
}

} // namespace detail

/// N-point Gauss-Legendre rule mapped to [0, 1], nodes ascending.
template <unsigned N>
const Rule& gauss_legendre01() {
    static const Rule rule = detail::make_gauss_legendre01<N>();
    return rule;
}

/// Composite Simpson on [a, b] with `panels` (even) subintervals.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
    if (panels % 2 != 0) ++panels;
    const double h = (b - a) / panels;
    if (h == 0.0) return 0.0;
    double odd = 0.0;
    double even = 0.0;
    for (int i = 1; i < panels; ++i) {
        const double v = f(a + i * h);
        (i % 2 ? odd : even) += v;
    }
    return h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b));
}

/// Uniform grid of `size` points spanning [0, 1] inclusive.
class UnitGrid {
public:
    explicit UnitGrid(std::size_t size) : size_(size), step_(1.0 / static_cast<double>(size - 1)) {}

    std::size_t size() const noexcept { return size_; }
    double step() const noexcept { return step_; }
    double operator[](std::size_t i) const noexcept {
        return i + 1 == size_ ? 1.0 : static_cast<double>(i) * step_;
    }

    /// Cell index i and fraction t with x = (1-t)*x_i + t*x_{i+1}; x is clamped to [0, 1].
    std::pair<std::size_t, double> locate(double x) const noexcept {
        x = std::clamp(x, 0.0, 1.0);
        const double pos = x / step_;
        auto i = static_cast<std::size_t>(pos);
        if (i >= size_ - 1) return {size_ - 2, 1.0};
        return {i, pos - static_cast<double>(i)};
    }

    double interpolate(std::span<const double> values, double x) const noexcept {
        const auto [i, t] = locate(x);
        if (t == 0.0) return values[i];
        if (t == 1.0) return values[i + 1];
        return (1.0 - t) * values[i] + t * values[i + 1];
    }

private:
    std::size_t size_;
    double step_;
};

} // namespace geofwd
