#pragma once

// Subcommand bodies. Each writes its CSV (after the config echo) to `out` and a short
// human-readable report to `report`. One-hop quantities are in units of r_c and T.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "geofwd/analytics.hpp"
#include "geofwd/bf_solver.hpp"
#include "geofwd/cli/run_config.hpp"
#include "geofwd/e2e.hpp"
#include "geofwd/error.hpp"
#include "geofwd/geometry.hpp"
#include "geofwd/network.hpp"
#include "geofwd/onehop.hpp"
#include "geofwd/random.hpp"
#include "geofwd/sf_policies.hpp"
#include "geofwd/sweep.hpp"

namespace geofwd::cli {

enum ExitCode : int { kOk = 0, kConfigFailure = 2, kNumericFailure = 3, kSimulationFailure = 4 };

/// Maps the library's error hierarchy onto process exit codes.
inline int exit_code_for(const std::exception& e) noexcept {
    if (dynamic_cast<const NumericError*>(&e)) return kNumericFailure;
    if (dynamic_cast<const SimulationError*>(&e)) return kSimulationFailure;
    return kConfigFailure;
}

// Stream indices under the master seed.
inline constexpr std::uint64_t kNetworkStream = 0;
inline constexpr std::uint64_t kTransferStream = 1;

namespace detail {

struct HopSetup {
    HopContext ctx;
    ProgressModel model;
};

inline HopSetup hop_setup(const RunConfig& cfg) {
    const double r_c = cfg.positive("r_c");
    const double L_i = cfg.positive("L_i");
    const auto K = cfg.at_least("K", 1);
    if (K > 100000) throw ConfigError("key 'K' is unreasonably large");
    const auto n_grid = cfg.at_least("n_grid", 64);
    auto ctx = HopContext::from_raw(L_i, r_c, static_cast<int>(K));
    if (ctx.reaches_sink()) throw ConfigError("L_i must exceed r_c (a closer relay sends to the sink)");
    auto model = build_progress_model(ctx, static_cast<std::size_t>(n_grid));
    return {ctx, std::move(model)};
}

inline int grid_side(const RunConfig& cfg, std::string_view key) {
    const auto v = cfg.at_least(key, 2);
    if (v > 4096) throw ConfigError("key '" + std::string(key) + "' must be <= 4096");
    return static_cast<int>(v);
}

inline OneHopOptions onehop_options(const RunConfig& cfg, int jobs) {
    OneHopOptions opt;
    opt.trials = static_cast<std::size_t>(cfg.at_least("trials", 10000));
    opt.seed = cfg.seed();
    opt.jobs = jobs;
    return opt;
}

inline E2eOptions e2e_options(const RunConfig& cfg, int jobs) {
    E2eOptions opt;
    opt.gamma = cfg.unit_interval("gamma");
    opt.transfers = static_cast<std::size_t>(cfg.at_least("transfers", 1));
    opt.period = cfg.positive("T");
    opt.beacon = cfg.positive("t_I");
    opt.packet = cfg.number("t_D");
    if (opt.packet < 0.0) throw ConfigError("key 't_D' must be nonnegative");
    if (!(opt.period > opt.beacon)) throw ConfigError("need t_I < T");
    opt.seed = derive_seed(cfg.seed(), kTransferStream);
    opt.jobs = jobs;
    return opt;
}

inline Network e2e_network(const RunConfig& cfg) {
    const double side = cfg.positive("L");
    const double density = cfg.positive("lambda");
    const double radius = cfg.positive("r_c");
    if (density * side * side < 1.0) throw ConfigError("need lambda * L^2 >= 1");
    if (density * side * side > 1e6) throw ConfigError("lambda * L^2 is too large");
    const auto retries = cfg.at_least("max_retries", 1);
    Stream rng(cfg.seed(), kNetworkStream);
    Network net = generate_network(side, density, radius, rng, static_cast<int>(std::min(retries, 1000000LL)));
    if (const auto& path = cfg.text("snapshot"); !path.empty()) {
        std::ofstream f(path);
        if (!f) throw ConfigError("cannot open snapshot file '" + path + "'");
        write_network_csv(f, net);
    }
    return net;
}

inline HopPolicy onehop_policy(const RunConfig& cfg, std::string_view name, const HopSetup& hop,
                               std::optional<ThresholdSurface>& surface, int n_w, int n_b) {
    const int K = hop.ctx.nodes();
    if (name == "ff") return FirstForward{};
    if (name == "mf") return MaxForward{};
    if (name == "bf") {
        surface.emplace(solve_bf(hop.ctx, hop.model, cfg.positive("eta"), n_w, n_b));
        return BestForward{&*surface};
    }
    if (name == "sf") {
        const auto& from = cfg.text("threshold_from");
        if (from == "eta") return solve_alpha(K, cfg.positive("eta"), hop.model);
        if (from == "alpha")
            return SfThreshold{cfg.unit_interval("alpha"), std::nullopt, K, sf_cutoff_eta(K, hop.model)};
        if (from == "gamma") return calibrate_threshold(cfg.unit_interval("gamma"), K, hop.model);
        throw ConfigError("threshold_from must be eta, alpha or gamma");
    }
    throw ConfigError("unknown one-hop policy '" + std::string(name) + "'");
}

inline std::vector<std::string> policy_list(const RunConfig& cfg) {
    auto names = cfg.list("policy");
    if (names.empty()) throw ConfigError("key 'policy' is empty");
    return names;
}

} // namespace detail

inline void cmd_solve_bf(const RunConfig& cfg, std::ostream& out, std::ostream& report, int /*jobs*/) {
    const auto hop = detail::hop_setup(cfg);
    const double eta = cfg.positive("eta");
    const int n_w = detail::grid_side(cfg, "n_w");
    const int n_b = detail::grid_side(cfg, "n_b");
    const auto surface = solve_bf(hop.ctx, hop.model, eta, n_w, n_b);

    cfg.echo(out, "solve-bf");
    write_surface_csv(out, surface);

    const int K = hop.ctx.nodes();
    report << "solve-bf K=" << K << " eta=" << csv::number(eta) << " grid=" << n_w << 'x' << n_b;
    if (K >= 2) {
        double worst = 0.0;
        for (std::size_t iw = 0; iw < surface.grid_w().size(); ++iw)
            for (std::size_t ib = 0; ib < surface.grid_b().size(); ++ib) {
                const double w = surface.grid_w()[iw];
                const double b = surface.grid_b()[ib];
                const double exact = b + hop.model.tail_integral(b) - (1.0 - w) / (2.0 * eta);
                worst = std::max(worst, std::abs(surface.at(K - 1, iw, ib) - exact));
            }
        report << " max|phi_{K-1} - analytic|=" << csv::number(worst);
    }
    report << '\n';
}

inline void cmd_solve_alpha(const RunConfig& cfg, std::ostream& out, std::ostream& report, int /*jobs*/) {
    const auto hop = detail::hop_setup(cfg);
    const int K = hop.ctx.nodes();
    const std::vector<double> etas = cfg.was_set("grid") ? cfg.grid("") : std::vector{cfg.positive("eta")};
    cfg.echo(out, "solve-alpha");
    out << "K,L_i,eta,eta_o,alpha,mean_delay,mean_progress\n";
    for (double eta : etas) {
        const auto th = solve_alpha(K, eta, hop.model);
        const auto avg = sf_averages(K, th.alpha, hop.model);
        csv::write_row(out, {csv::number(K), csv::number(hop.ctx.distance()), csv::number(eta),
                             csv::number(th.eta_o), csv::number(th.alpha), csv::number(avg.mean_delay),
                             csv::number(avg.mean_progress)});
        report << "solve-alpha K=" << K << " eta=" << csv::number(eta) << " alpha=" << csv::number(th.alpha)
               << " eta_o=" << csv::number(th.eta_o) << '\n';
    }
}

inline void cmd_onehop(const RunConfig& cfg, std::ostream& out, std::ostream& report, int jobs) {
    const auto hop = detail::hop_setup(cfg);
    const int n_w = detail::grid_side(cfg, "n_w");
    const int n_b = detail::grid_side(cfg, "n_b");
    auto opt = detail::onehop_options(cfg, jobs);
    // The Lagrangian column always uses the configured eta, so rows are comparable.
    opt.eta = cfg.positive("eta");

    cfg.echo(out, "onehop");
    write_onehop_header(out);
    // All policies share the trial streams (common random numbers).
    for (const auto& name : detail::policy_list(cfg)) {
        std::optional<ThresholdSurface> surface;
        const HopPolicy policy = detail::onehop_policy(cfg, name, hop, surface, n_w, n_b);
        const auto stats = run_onehop(policy, hop.ctx, hop.model, opt);
        write_onehop_row(out, policy, hop.ctx, stats);
        report << "onehop " << name << " K=" << hop.ctx.nodes() << " E[D]=" << csv::number(stats.delay.mean)
               << " (se " << csv::number(stats.delay.se) << ") E[Z]=" << csv::number(stats.progress.mean)
               << " (se " << csv::number(stats.progress.se) << ")\n";
    }
}

inline void cmd_analytics(const RunConfig& cfg, std::ostream& out, std::ostream& report, int /*jobs*/) {
    const auto hop = detail::hop_setup(cfg);
    const int K = hop.ctx.nodes();
    const std::string param = cfg.text("param").empty() ? "alpha" : cfg.text("param");
    if (param != "alpha" && param != "eta") throw ConfigError("analytics: param must be alpha or eta");
    const auto grid = cfg.grid(param == "alpha" ? "0:1:0.1" : "0.5,1,2,5,10");
    const SfProgressCurve curve(K, hop.model);

    cfg.echo(out, "analytics");
    write_averages_header(out);
    for (const auto& name : detail::policy_list(cfg)) {
        if (name == "ff") write_averages_row(out, ff_averages(K, hop.model), hop.ctx.distance());
        else if (name == "mf") write_averages_row(out, mf_averages(K, hop.model), hop.ctx.distance());
        else if (name == "sf") {
            for (double v : grid) {
                HopAverages a{"sf", K, v, std::nullopt, 0.0, 0.0};
                if (param == "eta") {
                    if (!(v > 0.0)) throw ConfigError("analytics: eta grid values must be positive");
                    a.alpha = solve_alpha(K, v, hop.model).alpha;
                    a.eta = v;
                } else if (!(v >= 0.0 && v <= 1.0)) {
                    throw ConfigError("analytics: alpha grid values must lie in [0, 1]");
                }
                a.mean_delay = curve.mean_delay(a.alpha);
                a.mean_progress = curve.mean_progress(a.alpha);
                write_averages_row(out, a, hop.ctx.distance());
            }
        } else {
            throw ConfigError("analytics: policy must be ff, mf or sf");
        }
    }
    report << "analytics K=" << K << " L_i=" << csv::number(hop.ctx.distance())
           << " E[Z]=" << csv::number(hop.model.mean()) << " eta_o=" << csv::number(sf_cutoff_eta(K, hop.model))
           << '\n';
}

inline void cmd_e2e(const RunConfig& cfg, std::ostream& out, std::ostream& report, int jobs) {
    auto opt = detail::e2e_options(cfg, jobs);
    const auto policies = detail::policy_list(cfg);
    std::vector<RoutePolicy> parsed;
    for (const auto& p : policies) parsed.push_back(parse_route_policy(p));
    const Network net = detail::e2e_network(cfg);
    ModelCache models(static_cast<std::size_t>(cfg.at_least("n_grid", 64)));

    cfg.echo(out, "e2e");
    write_e2e_header(out);
    for (auto policy : parsed) {
        opt.policy = policy;
        const auto stats = run_e2e(net, opt, models);
        write_e2e_row(out, net, opt, stats);
        report << "e2e " << to_string(policy) << " gamma=" << csv::number(opt.gamma)
               << " nodes=" << net.size() << " delay=" << csv::number(stats.delay.mean) << "s (se "
               << csv::number(stats.delay.se) << ") hops=" << csv::number(stats.hops.mean) << " (se "
               << csv::number(stats.hops.se) << ")\n";
    }
}

inline void cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& report, int jobs) {
    const auto& kind = cfg.text("kind");
    if (kind == "onehop") {
        const auto hop = detail::hop_setup(cfg);
        OneHopSweep plan;
        plan.policies = detail::policy_list(cfg);
        plan.param = cfg.text("param").empty() ? "eta" : cfg.text("param");
        plan.grid = cfg.grid(plan.param == "eta" ? "0.5,1,2,5,10" : "0:1:0.1");
        plan.n_w = detail::grid_side(cfg, "n_w");
        plan.n_b = detail::grid_side(cfg, "n_b");
        plan.eta = cfg.positive("eta");
        plan.run = detail::onehop_options(cfg, jobs);
        for (double v : plan.grid)
            if (plan.param == "eta" ? !(v > 0.0) : !(v >= 0.0 && v <= 1.0))
                throw ConfigError("sweep: grid value " + csv::number(v) + " out of range for " + plan.param);
        cfg.echo(out, "sweep");
        sweep_onehop(out, hop.ctx, hop.model, plan);
        report << "sweep onehop " << plan.grid.size() << " points x " << plan.policies.size() << " policies\n";
        return;
    }
    if (kind != "e2e") throw ConfigError("sweep: kind must be onehop or e2e");
    if (!cfg.text("param").empty() && cfg.text("param") != "gamma")
        throw ConfigError("sweep: e2e sweeps run over gamma");
    E2eSweep plan;
    plan.policies.clear();
    for (const auto& p : detail::policy_list(cfg)) plan.policies.push_back(parse_route_policy(p));
    plan.gammas = cfg.grid("0:0.9:0.1");
    for (double g : plan.gammas)
        if (!(g >= 0.0 && g <= 1.0)) throw ConfigError("sweep: gamma values must lie in [0, 1]");
    plan.run = detail::e2e_options(cfg, jobs);
    const Network net = detail::e2e_network(cfg);
    ModelCache models(static_cast<std::size_t>(cfg.at_least("n_grid", 64)));

    cfg.echo(out, "sweep");
    const auto rows = sweep_e2e(out, net, plan, models);
    for (const auto& t : e2e_trends(rows))
        report << "trend " << to_string(t.policy) << ": delay vs gamma rho=" << csv::number(t.delay.rho)
               << " p=" << csv::number(t.delay.p_value) << "; hops vs gamma rho="
               << csv::number(t.hops.rho) << " p=" << csv::number(t.hops.p_value) << '\n';
}

} // namespace geofwd::cli
