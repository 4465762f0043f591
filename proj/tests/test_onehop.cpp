#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "geofwd/analytics.hpp"
#include "geofwd/onehop.hpp"

using namespace geofwd;

namespace {

struct Fixture {
    HopContext ctx{10.0, 5};
    ProgressModel model = build_progress_model(ctx);
};

const Fixture& fx() {
    static const Fixture f;
    return f;
}

} // namespace

TEST(PlayHop, RecordsBestOfWokenNodes) {
    const auto& f = fx();
    const SfThreshold sf = solve_alpha(5, 2.0, f.model);
    const auto surface = solve_bf(f.ctx, f.model, 2.0);
    const HopPolicy policies[] = {FirstForward{}, MaxForward{}, sf, BestForward{&surface}};
    std::vector<double> wakes;
    for (const auto& policy : policies)
        for (std::uint64_t t = 0; t < 2000; ++t) {
            Stream rng(11, t);
            const auto out = play_hop(policy, 5, f.model, rng, wakes);
            // Replay the same stream by hand.
            Stream replay(11, t);
            std::vector<double> w;
            sample_wake_instants(5, replay, w);
            double best = 0.0;
            for (int k = 1; k <= out.stage; ++k) best = std::max(best, sample_progress(f.model, replay));
            ASSERT_GE(out.stage, 1);
            ASSERT_LE(out.stage, 5);
            ASSERT_EQ(out.delay, w[out.stage - 1]);
            ASSERT_EQ(out.progress, best) << policy_name(policy);
        }
}

TEST(PlayHop, PolicyStages) {
    const auto& f = fx();
    std::vector<double> wakes;
    for (std::uint64_t t = 0; t < 500; ++t) {
        Stream a(3, t), b(3, t);
        EXPECT_EQ(play_hop(FirstForward{}, 5, f.model, a, wakes).stage, 1);
        EXPECT_EQ(play_hop(MaxForward{}, 5, f.model, b, wakes).stage, 5);
    }
}

TEST(Simulate, FirstForwardDelayMatchesOrderStatistic) {
    const auto& f = fx();
    OneHopOptions opt;
    opt.trials = 200000;
    const auto s = run_onehop(FirstForward{}, f.ctx, f.model, opt);
    EXPECT_NEAR(s.delay.mean, 1.0 / 6.0, 3.0 * s.delay.se);
    EXPECT_NEAR(s.progress.mean, f.model.mean(), 3.0 * s.progress.se);
}

TEST(Simulate, IndependentOfWorkerCount) {
    const auto& f = fx();
    const SfThreshold sf = solve_alpha(5, 2.0, f.model);
    OneHopOptions opt;
    opt.trials = 20000;
    opt.seed = 99;
    const auto one = simulate_onehop(sf, f.ctx, f.model, opt);
    opt.jobs = 3;
    const auto three = simulate_onehop(sf, f.ctx, f.model, opt);
    ASSERT_EQ(one.size(), three.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        ASSERT_EQ(one[i].delay, three[i].delay);
        ASSERT_EQ(one[i].progress, three[i].progress);
        ASSERT_EQ(one[i].stage, three[i].stage);
    }
}

TEST(Simulate, LagrangianUsesRequestedEta) {
    const auto& f = fx();
    OneHopOptions opt;
    opt.trials = 10000;
    opt.eta = 3.0;
    const auto s = run_onehop(MaxForward{}, f.ctx, f.model, opt);
    EXPECT_NEAR(s.J(), s.mean_delay() - 3.0 * s.mean_progress(), 1e-12);
    EXPECT_EQ(s.eta, 3.0);
}

TEST(Simulate, Validation) {
    const auto& f = fx();
    OneHopOptions opt;
    opt.trials = 9999;
    EXPECT_THROW(run_onehop(FirstForward{}, f.ctx, f.model, opt), DomainError);
    opt.trials = 10000;
    const SfThreshold wrong_k = solve_alpha(3, 2.0, f.model);
    EXPECT_THROW(run_onehop(wrong_k, f.ctx, f.model, opt), ConfigError);
    EXPECT_THROW(run_onehop(BestForward{}, f.ctx, f.model, opt), ConfigError);
    const auto s3 = solve_bf(f.ctx.with_nodes(3), f.model, 2.0, 10, 10);
    EXPECT_THROW(run_onehop(BestForward{&s3}, f.ctx, f.model, opt), ConfigError);
}

TEST(Csv, OneHopRow) {
    const auto& f = fx();
    OneHopOptions opt;
    opt.trials = 10000;
    std::ostringstream os;
    write_onehop_header(os);
    write_onehop_row(os, MaxForward{}, f.ctx, run_onehop(MaxForward{}, f.ctx, f.model, opt));
    const auto text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "policy,K,L_i,eta,alpha,mean_delay,se_delay,mean_progress,se_progress,J");
    EXPECT_EQ(text.substr(text.find('\n') + 1, 12), "mf,5,10,0,1,");
}
