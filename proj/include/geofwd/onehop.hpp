#pragma once

// Monte-Carlo evaluation of single-hop policies on the exact model: dependent wake
// instants (sorted uniforms) and i.i.d. progress values drawn from the tabulated law.

#include <optional>
#include <ostream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "geofwd/bf_solver.hpp"
#include "geofwd/csv.hpp"
#include "geofwd/decision.hpp"
#include "geofwd/error.hpp"
#include "geofwd/geometry.hpp"
#include "geofwd/parallel.hpp"
#include "geofwd/random.hpp"
#include "geofwd/sf_policies.hpp"
#include "geofwd/stats.hpp"
#include "geofwd/wake_model.hpp"

namespace geofwd {

struct FirstForward {};
struct MaxForward {};
struct BestForward {
    const ThresholdSurface* surface = nullptr;
};

using HopPolicy = std::variant<FirstForward, MaxForward, SfThreshold, BestForward>;

inline std::string policy_name(const HopPolicy& p) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, FirstForward>) return "ff";
            else if constexpr (std::is_same_v<T, MaxForward>) return "mf";
            else if constexpr (std::is_same_v<T, SfThreshold>) return "sf";
            else return "bf";
        },
        p);
}

inline Action decide(const HopPolicy& p, int k, int K, double w, double b) {
    return std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, FirstForward>) return ff_decide(k);
            else if constexpr (std::is_same_v<T, MaxForward>) return mf_decide(k, K);
            else if constexpr (std::is_same_v<T, SfThreshold>) return sf_decide(v, k, b);
            else return bf_decide(*v.surface, k, w, b);
        },
        p);
}

struct HopOutcome {
    double delay = 0.0;
    double progress = 0.0;
    int stage = 0;
};

struct OneHopOptions {
    std::size_t trials = 100000;
    std::uint64_t seed = 1;
    /// Multiplier used for the Lagrangian D - eta Z; defaults to the policy's own.
    std::optional<double> eta;
    int jobs = 1;
};

struct HopStats {
    std::size_t trials = 0;
    double eta = 0.0;
    Summary delay;
    Summary progress;
    Summary lagrangian;

    double mean_delay() const noexcept { return delay.mean; }
    double mean_progress() const noexcept { return progress.mean; }
    double J() const noexcept { return lagrangian.mean; }
};

namespace detail {

inline void check_policy(const HopPolicy& policy, const HopContext& ctx) {
    if (const auto* bf = std::get_if<BestForward>(&policy)) {
        if (bf->surface == nullptr) throw ConfigError("onehop: best-forward policy without a surface");
        if (bf->surface->stages() != ctx.nodes())
            throw ConfigError("onehop: surface built for K=" + std::to_string(bf->surface->stages()) +
                              " but context has K=" + std::to_string(ctx.nodes()));
    }
    if (const auto* sf = std::get_if<SfThreshold>(&policy)) {
        if (sf->K != ctx.nodes()) throw ConfigError("onehop: threshold solved for a different K");
    }
}

inline std::optional<double> policy_eta(const HopPolicy& p) {
    if (const auto* bf = std::get_if<BestForward>(&p)) return bf->surface->eta();
    if (const auto* sf = std::get_if<SfThreshold>(&p)) return sf->eta;
    return std::nullopt;
}

} // namespace detail

/// Plays one trial from its own stream: K wake instants first, then K progress values.
inline HopOutcome play_hop(const HopPolicy& policy, int K, const ProgressModel& model, Stream& rng,
                           std::vector<double>& wakes) {
    sample_wake_instants(K, rng, wakes);
    HopOutcome out;
    double best = 0.0;
    for (int k = 1; k <= K; ++k) {
        const double z = sample_progress(model, rng);
        best = k == 1 ? z : std::max(best, z);
        const double w = wakes[static_cast<std::size_t>(k - 1)];
        if (k == K || decide(policy, k, K, w, best) == Action::Stop) {
            out = {w, best, k};
            // Remaining progress draws are skipped; trial streams are independent.
            break;
        }
    }
    return out;
}

inline std::vector<HopOutcome> simulate_onehop(const HopPolicy& policy, const HopContext& ctx,
                                               const ProgressModel& model, const OneHopOptions& opt) {
    detail::check_policy(policy, ctx);
    const int K = ctx.nodes();
    if (K < 1) throw DomainError("onehop: need K >= 1");
    constexpr std::size_t kBlock = 4096;
    std::vector<HopOutcome> outcomes(opt.trials);
    const std::size_t blocks = (opt.trials + kBlock - 1) / kBlock;
    parallel_for(blocks, opt.jobs, [&](std::size_t blk) {
        std::vector<double> wakes;
        const std::size_t end = std::min(opt.trials, (blk + 1) * kBlock);
        for (std::size_t t = blk * kBlock; t < end; ++t) {
            Stream rng(opt.seed, t);
            outcomes[t] = play_hop(policy, K, model, rng, wakes);
        }
    });
    return outcomes;
}

inline HopStats summarize_hops(const std::vector<HopOutcome>& outcomes, double eta) {
    std::vector<double> d(outcomes.size()), z(outcomes.size()), j(outcomes.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        d[i] = outcomes[i].delay;
        z[i] = outcomes[i].progress;
        j[i] = d[i] - eta * z[i];
    }
    return {outcomes.size(), eta, summarize(d), summarize(z), summarize(j)};
}

inline HopStats run_onehop(const HopPolicy& policy, const HopContext& ctx, const ProgressModel& model,
                           const OneHopOptions& opt) {
    if (opt.trials < 10000) throw DomainError("run_onehop: need at least 10^4 trials");
    detail::check_policy(policy, ctx);
    const double eta = opt.eta.value_or(detail::policy_eta(policy).value_or(0.0));
    return summarize_hops(simulate_onehop(policy, ctx, model, opt), eta);
}

inline void write_onehop_header(std::ostream& os) {
    os << "policy,K,L_i,eta,alpha,mean_delay,se_delay,mean_progress,se_progress,J\n";
}

inline void write_onehop_row(std::ostream& os, const HopPolicy& policy, const HopContext& ctx,
                             const HopStats& s) {
    std::string alpha;
    if (const auto* sf = std::get_if<SfThreshold>(&policy)) alpha = csv::number(sf->alpha);
    else if (std::holds_alternative<FirstForward>(policy)) alpha = "0";
    else if (std::holds_alternative<MaxForward>(policy)) alpha = "1";
    csv::write_row(os, {policy_name(policy), csv::number(ctx.nodes()), csv::number(ctx.distance()),
                        csv::number(s.eta), alpha, csv::number(s.delay.mean), csv::number(s.delay.se),
                        csv::number(s.progress.mean), csv::number(s.progress.se),
                        csv::number(s.lagrangian.mean)});
}

} // namespace geofwd
