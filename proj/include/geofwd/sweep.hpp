#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "geofwd/bf_solver.hpp"
#include "geofwd/e2e.hpp"
#include "geofwd/error.hpp"
#include "geofwd/geometry.hpp"
#include "geofwd/network.hpp"
#include "geofwd/onehop.hpp"
#include "geofwd/random.hpp"
#include "geofwd/sf_policies.hpp"
#include "geofwd/stats.hpp"

namespace geofwd {

struct OneHopSweep {
    std::vector<std::string> policies{"sf"};
    /// "eta" or "alpha" (alpha only drives sf).
    std::string param = "eta";
    std::vector<double> grid;
    int n_w = kBfGridSide;
    int n_b = kBfGridSide;
    /// eta used for J when sweeping alpha.
    double eta = 1.0;
    OneHopOptions run;
};

/// One row per (policy, grid value); point p runs on seed derive_seed(seed, p).
inline void sweep_onehop(std::ostream& os, const HopContext& ctx, const ProgressModel& model,
                         const OneHopSweep& plan) {
    if (plan.param != "eta" && plan.param != "alpha")
        throw ConfigError("onehop sweep: param must be eta or alpha");
    write_onehop_header(os);
    std::uint64_t point = 0;
    for (const auto& name : plan.policies) {
        for (double v : plan.grid) {
            OneHopOptions run = plan.run;
            run.seed = derive_seed(plan.run.seed, point++);
            const double eta = plan.param == "eta" ? v : plan.eta;
            run.eta = eta;
            std::optional<ThresholdSurface> surface;
            HopPolicy policy = FirstForward{};
            if (name == "ff") policy = FirstForward{};
            else if (name == "mf") policy = MaxForward{};
            else if (name == "sf") {
                if (plan.param == "eta") policy = solve_alpha(ctx.nodes(), eta, model);
                else policy = SfThreshold{v, std::nullopt, ctx.nodes(), sf_cutoff_eta(ctx.nodes(), model)};
            } else if (name == "bf") {
                if (plan.param != "eta") throw ConfigError("onehop sweep: bf is swept over eta only");
                surface.emplace(solve_bf(ctx, model, eta, plan.n_w, plan.n_b));
                policy = BestForward{&*surface};
            } else {
                throw ConfigError("onehop sweep: unknown policy '" + name + "'");
            }
            write_onehop_row(os, policy, ctx, run_onehop(policy, ctx, model, run));
        }
    }
}

struct E2eSweep {
    std::vector<RoutePolicy> policies{RoutePolicy::sf};
    std::vector<double> gammas;
    E2eOptions run;
};

struct E2eSweepRow {
    RoutePolicy policy;
    double gamma;
    E2EStats stats;
};

inline std::vector<E2eSweepRow> sweep_e2e(std::ostream& os, const Network& net, const E2eSweep& plan,
                                          ModelCache& models) {
    write_e2e_header(os);
    std::vector<E2eSweepRow> rows;
    std::uint64_t point = 0;
    for (auto policy : plan.policies) {
        for (double g : plan.gammas) {
            E2eOptions run = plan.run;
            run.policy = policy;
            run.gamma = g;
            run.seed = derive_seed(plan.run.seed, point++);
            auto stats = run_e2e(net, run, models);
            write_e2e_row(os, net, run, stats);
            rows.push_back({policy, g, std::move(stats)});
        }
    }
    return rows;
}

struct TrendReport {
    RoutePolicy policy;
    RankCorrelation delay;
    RankCorrelation hops;
};

/// Spearman correlation of mean delay and mean hop count against gamma, per policy.
inline std::vector<TrendReport> e2e_trends(const std::vector<E2eSweepRow>& rows) {
    std::vector<TrendReport> out;
    for (std::size_t i = 0; i < rows.size();) {
        std::size_t j = i;
        std::vector<double> g, d, h;
        while (j < rows.size() && rows[j].policy == rows[i].policy) {
            g.push_back(rows[j].gamma);
            d.push_back(rows[j].stats.delay.mean);
            h.push_back(rows[j].stats.hops.mean);
            ++j;
        }
        out.push_back({rows[i].policy, spearman(g, d), spearman(g, h)});
        i = j;
    }
    return out;
}

} // namespace geofwd
