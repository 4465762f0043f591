#pragma once

// Poisson-deployed node field on [0, L]^2 with the source at (0, 0) (index 0) and the
// sink at (L, L) (index N + 1).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "geofwd/csv.hpp"
#include "geofwd/error.hpp"
#include "geofwd/random.hpp"

namespace geofwd {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point a, Point b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

struct Network {
    double side = 0.0;
    double density = 0.0;
    double radius = 1.0;
    std::vector<Point> positions;
    std::vector<std::vector<int>> neighbors;
    /// Neighbors strictly closer to the sink, ascending index.
    std::vector<std::vector<int>> forwarding;
    std::vector<double> sink_distance;
    /// Wake phases in units of the period, drawn at generation time (snapshot only).
    std::vector<double> phases;
    int attempts = 0;

    int size() const noexcept { return static_cast<int>(positions.size()); }
    static constexpr int source() noexcept { return 0; }
    int sink() const noexcept { return size() - 1; }
};

namespace detail {

inline void link_neighbors(Network& net) {
    const int n = net.size();
    const double r = net.radius;
    const int cells = std::max(1, static_cast<int>(std::ceil(net.side / r)));
    auto cell_of = [&](double v) { return std::clamp(static_cast<int>(v / r), 0, cells - 1); };
    std::vector<std::vector<int>> bucket(static_cast<std::size_t>(cells) * cells);
    for (int i = 0; i < n; ++i)
        bucket[static_cast<std::size_t>(cell_of(net.positions[i].x)) * cells + cell_of(net.positions[i].y)]
            .push_back(i);

    net.neighbors.assign(static_cast<std::size_t>(n), {});
    for (int i = 0; i < n; ++i) {
        const int cx = cell_of(net.positions[i].x);
        const int cy = cell_of(net.positions[i].y);
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy) {
                const int gx = cx + dx, gy = cy + dy;
                if (gx < 0 || gy < 0 || gx >= cells || gy >= cells) continue;
                for (int j : bucket[static_cast<std::size_t>(gx) * cells + gy])
                    if (j != i && distance(net.positions[i], net.positions[j]) <= r)
                        net.neighbors[i].push_back(j);
            }
        std::sort(net.neighbors[i].begin(), net.neighbors[i].end());
    }

    net.forwarding.assign(static_cast<std::size_t>(n), {});
    for (int i = 0; i < n; ++i)
        for (int j : net.neighbors[i])
            if (net.sink_distance[j] < net.sink_distance[i]) net.forwarding[i].push_back(j);
}

} // namespace detail

/// Every non-sink node has a nonempty forwarding set.
inline bool forwarding_sets_nonempty(const Network& net) {
    for (int i = 0; i < net.sink(); ++i)
        if (net.forwarding[i].empty()) return false;
    return true;
}

/// Builds a network from explicit interior positions (source and sink are appended).
inline Network make_network(double side, double density, double radius, std::vector<Point> interior,
                            std::vector<double> phases = {}) {
    Network net;
    net.side = side;
    net.density = density;
    net.radius = radius;
    net.positions.reserve(interior.size() + 2);
    net.positions.push_back({0.0, 0.0});
    net.positions.insert(net.positions.end(), interior.begin(), interior.end());
    net.positions.push_back({side, side});
    const Point sink = net.positions.back();
    for (const auto& p : net.positions) net.sink_distance.push_back(distance(p, sink));
    net.phases = std::move(phases);
    net.phases.resize(net.positions.size(), 0.0);
    detail::link_neighbors(net);
    return net;
}

inline Network generate_network(double side, double density, double radius, Stream& rng,
                                 int max_retries = 1000) {
    if (!(side > 0.0) || !(density > 0.0) || !(radius > 0.0))
        throw DomainError("generate_network: side, density and radius must be positive");
    if (density * side * side < 1.0) throw DomainError("generate_network: need lambda L^2 >= 1");
    for (int attempt = 1; attempt <= max_retries; ++attempt) {
        std::poisson_distribution<long> count(density * side * side);
        const long n = count(rng);
        std::vector<Point> pts(static_cast<std::size_t>(n));
        for (auto& p : pts) p = {side * rng.uniform(), side * rng.uniform()};
        std::vector<double> phases(static_cast<std::size_t>(n) + 2);
        for (double& ph : phases) ph = rng.uniform();
        Network net = make_network(side, density, radius, std::move(pts), std::move(phases));
        net.attempts = attempt;
        if (forwarding_sets_nonempty(net)) return net;
    }
    throw SimulationError("generate_network: no network with nonempty forwarding sets after " +
                          std::to_string(max_retries) + " attempts");
}

/// Snapshot: index,x,y,phase.
inline void write_network_csv(std::ostream& os, const Network& net) {
    os << "index,x,y,phase\n";
    for (int i = 0; i < net.size(); ++i)
        csv::write_row(os, {csv::number(i), csv::number(net.positions[i].x), csv::number(net.positions[i].y),
                            csv::number(net.phases[i])});
}

} // namespace geofwd
