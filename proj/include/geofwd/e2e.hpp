#pragma once

// End-to-end forwarding over a fixed network with beacon slotting.
//
// A relay holding the packet beacons in slots of length t_I. A forwarding-set node
// whose wake falls in slot m is handled at the end of slot m; wakers sharing a slot
// contend and the one with the most progress (then the smaller index) answers. The
// relay forwards once the best progress seen reaches its threshold, or, when it knows
// its forwarding-set size, once every member has woken. The transfer costs t_D on top
// of the slots spent. A relay within r_c of the sink waits for the sink instead.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "geofwd/csv.hpp"
#include "geofwd/error.hpp"
#include "geofwd/geometry.hpp"
#include "geofwd/network.hpp"
#include "geofwd/parallel.hpp"
#include "geofwd/random.hpp"
#include "geofwd/sf_policies.hpp"
#include "geofwd/stats.hpp"
#include "geofwd/wake_model.hpp"

namespace geofwd {

enum class RoutePolicy { sf, sf_hat, ff, mf };

inline std::string_view to_string(RoutePolicy p) noexcept {
    switch (p) {
    case RoutePolicy::sf: return "sf";
    case RoutePolicy::sf_hat: return "sf-hat";
    case RoutePolicy::ff: return "ff";
    case RoutePolicy::mf: return "mf";
    }
    return "?";
}

inline RoutePolicy parse_route_policy(std::string_view s) {
    if (s == "sf") return RoutePolicy::sf;
    if (s == "sf-hat") return RoutePolicy::sf_hat;
    if (s == "ff") return RoutePolicy::ff;
    if (s == "mf") return RoutePolicy::mf;
    throw ConfigError("unknown end-to-end policy '" + std::string(s) + "'");
}

struct E2eOptions {
    RoutePolicy policy = RoutePolicy::sf;
    double gamma = 0.0;
    std::size_t transfers = 1000;
    double period = 1.0;  ///< T, seconds
    double beacon = 0.005; ///< t_I, seconds
    double packet = 0.030; ///< t_D, seconds
    std::uint64_t seed = 1;
    int jobs = 1;
};

struct TransferRecord {
    double delay = 0.0;
    int hops = 0;
};

struct E2EStats {
    std::size_t transfers = 0;
    Summary delay; ///< seconds
    Summary hops;
    std::vector<TransferRecord> records;
};

/// Progress models keyed by sink distance rounded to 0.01 r_c. Thread-safe.
class ModelCache {
public:
    explicit ModelCache(std::size_t n_grid = kDefaultProgressGrid) : n_grid_(n_grid) {}

    std::shared_ptr<const ProgressModel> get(double distance) {
        // Keys below 1.01 would round onto the sink-reaching geometry.
        const long key = std::max(101L, std::lround(distance * 100.0));
        {
            std::lock_guard lock(mutex_);
            if (auto it = models_.find(key); it != models_.end()) return it->second;
        }
        auto model = std::make_shared<const ProgressModel>(
            build_progress_model(HopContext(static_cast<double>(key) / 100.0, 1), n_grid_));
        std::lock_guard lock(mutex_);
        return models_.emplace(key, std::move(model)).first->second;
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return models_.size();
    }

private:
    std::size_t n_grid_;
    mutable std::mutex mutex_;
    std::map<long, std::shared_ptr<const ProgressModel>> models_;
};

/// Forwarding-set size assumed by the estimated-count variant: floor(lambda |S_i|), at least 1.
inline int estimated_forwarding_count(const Network& net, int node) {
    const HopContext ctx(net.sink_distance[node] / net.radius, 1);
    const double area = region_area(ctx, 0.0) * net.radius * net.radius;
    return std::max(1, static_cast<int>(std::floor(net.density * area)));
}

/// Per-relay thresholds for one (policy, gamma), resolved lazily.
class RelayThresholds {
public:
    RelayThresholds(const Network& net, RoutePolicy policy, double gamma, ModelCache& models)
        : net_(&net), policy_(policy), gamma_(gamma), models_(&models),
          alpha_(static_cast<std::size_t>(net.size())) {}

    double alpha(int node) {
        {
            std::lock_guard lock(mutex_);
            if (alpha_[node]) return *alpha_[node];
        }
        const double a = resolve(node);
        std::lock_guard lock(mutex_);
        alpha_[node] = a;
        return a;
    }

    /// Forwarding-set size the relay acts on (its true K, or the estimate).
    int assumed_count(int node) const {
        return policy_ == RoutePolicy::sf_hat ? estimated_forwarding_count(*net_, node)
                                              : static_cast<int>(net_->forwarding[node].size());
    }

private:
    double resolve(int node) {
        switch (policy_) {
        case RoutePolicy::ff: return 0.0;
        case RoutePolicy::mf: return 1.0;
        default: break;
        }
        const auto model = models_->get(net_->sink_distance[node] / net_->radius);
        return calibrate_threshold(gamma_, assumed_count(node), *model).alpha;
    }

    const Network* net_;
    RoutePolicy policy_;
    double gamma_;
    ModelCache* models_;
    std::mutex mutex_;
    std::vector<std::optional<double>> alpha_;
};

namespace detail {

inline int slot_of(double wait, double beacon) {
    return std::max(1, static_cast<int>(std::ceil(wait / beacon)));
}

struct Waker {
    int slot;
    double progress;
    int node;
};

// Strictly better: more progress, ties to the smaller index.
inline bool better(const Waker& a, const Waker& b) {
    return a.progress > b.progress || (a.progress == b.progress && a.node < b.node);
}

} // namespace detail

inline TransferRecord run_transfer(const Network& net, const E2eOptions& opt, RelayThresholds& thresholds,
                                   Stream& rng) {
    const int n = net.size();
    const int sink = net.sink();
    std::vector<double> phase(static_cast<std::size_t>(n));
    for (double& p : phase) p = opt.period * rng.uniform();
    const int slots_per_period = static_cast<int>(std::lround(opt.period / opt.beacon));
    const bool knows_count = opt.policy != RoutePolicy::sf_hat;

    TransferRecord rec;
    double t = 0.0;
    int node = Network::source();
    std::vector<detail::Waker> wakers;
    while (node != sink) {
        if (rec.hops > n) throw SimulationError("run_e2e: packet did not reach the sink");
        const double d = net.sink_distance[node] / net.radius;
        if (d <= 1.0) {
            const int m = detail::slot_of(waiting_time(t, phase[sink], opt.period), opt.beacon);
            t += m * opt.beacon + opt.packet;
            ++rec.hops;
            node = sink;
            break;
        }
        const auto& fwd = net.forwarding[node];
        if (fwd.empty()) throw SimulationError("run_e2e: relay " + std::to_string(node) + " has no forwarding set");

        const double alpha = thresholds.alpha(node);
        wakers.clear();
        for (int j : fwd)
            wakers.push_back({detail::slot_of(waiting_time(t, phase[j], opt.period), opt.beacon),
                              (net.sink_distance[node] - net.sink_distance[j]) / net.radius, j});
        std::sort(wakers.begin(), wakers.end(), [](const auto& a, const auto& b) {
            return a.slot != b.slot ? a.slot < b.slot : detail::better(a, b);
        });

        const auto count = wakers.size();
        std::optional<detail::Waker> best;
        int stop_slot = 0;
        for (std::size_t i = 0; i < count;) {
            const int slot = wakers[i].slot;
            std::size_t end = i;
            while (end < count && wakers[end].slot == slot) ++end;
            // wakers[i] wins the contention within this slot.
            if (!best || detail::better(wakers[i], *best)) best = wakers[i];
            i = end;
            if (best->progress >= alpha || (knows_count && i == count)) {
                stop_slot = slot;
                break;
            }
        }
        if (stop_slot == 0) stop_slot = slots_per_period;

        t += stop_slot * opt.beacon + opt.packet;
        ++rec.hops;
        node = best->node;
    }
    rec.delay = t;
    return rec;
}

inline E2EStats run_e2e(const Network& net, const E2eOptions& opt, ModelCache& models) {
    if (opt.transfers < 1) throw DomainError("run_e2e: need at least one transfer");
    if (!(opt.gamma >= 0.0 && opt.gamma <= 1.0)) throw DomainError("run_e2e: gamma outside [0, 1]");
    if (!(opt.beacon > 0.0) || !(opt.period > opt.beacon) || !(opt.packet >= 0.0))
        throw DomainError("run_e2e: need 0 < t_I < T and t_D >= 0");
    RelayThresholds thresholds(net, opt.policy, opt.gamma, models);

    E2EStats s;
    s.transfers = opt.transfers;
    s.records.resize(opt.transfers);
    parallel_for(opt.transfers, opt.jobs, [&](std::size_t i) {
        Stream rng(opt.seed, i);
        s.records[i] = run_transfer(net, opt, thresholds, rng);
    });
    std::vector<double> d(opt.transfers), h(opt.transfers);
    for (std::size_t i = 0; i < opt.transfers; ++i) {
        d[i] = s.records[i].delay;
        h[i] = s.records[i].hops;
    }
    s.delay = summarize(d);
    s.hops = summarize(h);
    return s;
}

inline E2EStats run_e2e(const Network& net, const E2eOptions& opt) {
    ModelCache models;
    return run_e2e(net, opt, models);
}

inline void write_e2e_header(std::ostream& os) {
    os << "policy,gamma,L,lambda,transfers,mean_delay_s,se_delay_s,mean_hops,se_hops\n";
}

inline void write_e2e_row(std::ostream& os, const Network& net, const E2eOptions& opt, const E2EStats& s) {
    csv::write_row(os, {std::string(to_string(opt.policy)), csv::number(opt.gamma), csv::number(net.side),
                        csv::number(net.density), csv::number(static_cast<long long>(s.transfers)),
                        csv::number(s.delay.mean), csv::number(s.delay.se), csv::number(s.hops.mean),
                        csv::number(s.hops.se)});
}

} // namespace geofwd
