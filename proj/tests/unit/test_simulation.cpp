#include <cmath>

#include <gtest/gtest.h>

#include "platoon/model.hpp"
#include "platoon/simulation.hpp"

using namespace platoon;

namespace {

std::vector<VehicleParams> ten_vehicles() {
    const double tau[] = {0.3, 0.3, 0.25, 0.25, 0.2, 0.25, 0.3, 0.25, 0.25, 0.3};
    const double h[] = {1.0, 0.4, 0.4, 0.5, 0.5, 0.3, 0.25, 0.25, 0.5, 0.3};
    const double dc[] = {0.03, 0.09, 0.12, 0.14, 0.09, 0.18, 0.1, 0.12, 0.14, 0.0};
    const std::size_t m[] = {1, 1, 2, 3, 3, 3, 3, 3, 3, 3};
    std::vector<VehicleParams> out(10);
    for (std::size_t i = 0; i < 10; ++i) {
        out[i].tau = tau[i];
        out[i].h = h[i];
        out[i].dc = dc[i];
        out[i].m = m[i];
    }
    return out;
}

PlatoonConfig scenario(LeaderProfile profile, double horizon) {
    PlatoonConfig cfg;
    cfg.vehicles = ten_vehicles();
    cfg.horizon = horizon;
    cfg.leader_profile = std::move(profile);
    return cfg;
}

}  // namespace

TEST(RunScenario, ShapesAndDeterminism) {
    const auto vc = validate_platoon(scenario(LeaderProfile::piecewise({{0, 14}, {5, 14}, {8, 18}}), 12.0));
    const SimulationResult a = run_scenario(vc);
    const SimulationResult b = run_scenario(vc);
    ASSERT_EQ(a.vehicle_count(), 10u);
    ASSERT_EQ(a.sample_count(), 1200u);
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(a.speed[i].size(), 1200u);
        EXPECT_EQ(a.speed[i], b.speed[i]);
        EXPECT_EQ(a.spacing[i], b.spacing[i]);
        EXPECT_EQ(a.control[i], b.control[i]);
    }
}

TEST(RunScenario, ConstantRunHasZeroMetrics) {
    PlatoonConfig cfg = scenario(LeaderProfile::constant(20.0), 30.0);
    cfg.initial_state = equilibrium_state(cfg.vehicles, 20.0);
    const SimulationResult r = run_scenario(validate_platoon(cfg));
    for (std::size_t i = 0; i < 10; ++i) {
        const auto& m = r.metrics[i];
        EXPECT_NEAR(m.overshoot, 0.0, 1e-9);
        EXPECT_NEAR(m.l2_speed_dev, 0.0, 1e-9);
        EXPECT_NEAR(m.terminal_spacing_error, 0.0, 1e-9);
        EXPECT_FALSE(m.amplifies);
    }
}

TEST(RunScenario, TimeShiftInvariance) {
    const auto profile = LeaderProfile::piecewise({{0, 20}, {3, 20}, {6, 23}, {9, 20}});
    PlatoonConfig a = scenario(profile, 20.0);
    a.initial_state = equilibrium_state(a.vehicles, 20.0);
    PlatoonConfig b = a;
    b.leader_profile = profile.shifted(0.5);
    const auto ra = run_scenario(validate_platoon(a));
    const auto rb = run_scenario(validate_platoon(b));
    for (std::size_t i = 0; i < 10; ++i) {
        for (std::size_t k = 0; k + 50 < 2000; ++k) {
            EXPECT_NEAR(ra.speed[i][k], rb.speed[i][k + 50], 1e-9) << i << ' ' << k;
        }
    }
}

TEST(RunScenario, GridRefinementFirstOrder) {
    auto run = [](double ts) {
        PlatoonConfig cfg = scenario(LeaderProfile::piecewise({{0, 20}, {2, 20}, {6, 24}}), 20.0);
        cfg.sample_time = ts;
        cfg.initial_state = equilibrium_state(cfg.vehicles, 20.0);
        return run_scenario(validate_platoon(cfg));
    };
    const auto coarse = run(0.01);
    const auto fine = run(0.005);
    const auto finest = run(0.0025);
    double e1 = 0.0;
    double e2 = 0.0;
    // Compare at t = 15 s.
    for (std::size_t i = 0; i < 10; ++i) {
        e1 = std::max(e1, std::abs(coarse.speed[i][1500] - finest.speed[i][6000]));
        e2 = std::max(e2, std::abs(fine.speed[i][3000] - finest.speed[i][6000]));
    }
    EXPECT_LT(e1, 0.05);
    EXPECT_GT(e1 / e2, 2.0);  // first order: (Ts - Ts/4) / (Ts/2 - Ts/4) = 3
}

TEST(RunScenario, DataDrivenLeaderFollowsRecord) {
    std::vector<double> t;
    std::vector<double> v;
    for (int k = 0; k <= 300; ++k) {
        t.push_back(0.1 * k);
        v.push_back(14.9 + std::sin(0.1 * k));
    }
    PlatoonConfig cfg = scenario(LeaderProfile::data_driven(t, v), 25.0);
    cfg.vehicles.resize(4);
    const SimulationResult r = run_scenario(validate_platoon(cfg));
    for (std::size_t k = 0; k < r.sample_count(); k += 100) {
        EXPECT_NEAR(r.speed[0][k], cfg.leader_profile.speed_at(r.time[k]), 1e-9);
    }
}

TEST(RunBatch, MatchesSequentialRuns) {
    std::vector<ValidatedConfig> cfgs;
    for (const double top : {16.0, 18.0, 20.0}) {
        cfgs.push_back(validate_platoon(scenario(LeaderProfile::piecewise({{0, 14}, {4, 14}, {6, top}}), 10.0)));
    }
    const auto batch = run_batch(cfgs, 2);
    for (std::size_t k = 0; k < cfgs.size(); ++k) {
        const auto one = run_scenario(cfgs[k]);
        for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(batch[k].speed[i], one.speed[i]);
    }
}

TEST(Metrics, HandComputed) {
    SimulationResult r;
    r.sample_time = 1.0;
    r.time = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    r.speed = {{10, 10, 11, 12, 12, 12, 11, 10, 10, 10}, {10, 10, 10, 11, 13, 12, 11, 10, 10, 10}};
    r.spacing = {std::vector<double>(10, 0.0), std::vector<double>(10, 10.0)};
    std::vector<VehicleParams> v(2);
    v[1].h = 1.0;
    const auto m = compute_metrics(r, v, 10.0);
    EXPECT_EQ(m[0].peak_speed, 12.0);
    EXPECT_EQ(m[1].overshoot, 3.0);
    // trapezoid of squared deviations
    EXPECT_NEAR(m[0].l2_speed_dev, std::sqrt(0.5 + 2.5 + 4 + 4 + 2.5 + 0.5), 1e-12);
    EXPECT_NEAR(m[1].l2_speed_dev, std::sqrt(0.5 + 5 + 6.5 + 2.5 + 0.5), 1e-12);
    EXPECT_TRUE(m[1].amplifies);
    EXPECT_EQ(m[1].terminal_spacing_error, 0.0);
    EXPECT_EQ(m[1].min_spacing, 10.0);
}

TEST(SinglePredecessor, Override) {
    const PlatoonConfig c = with_single_predecessor(scenario(LeaderProfile::constant(14), 10));
    for (std::size_t i = 1; i < c.vehicles.size(); ++i) EXPECT_EQ(c.vehicles[i].m, 1u);
}
