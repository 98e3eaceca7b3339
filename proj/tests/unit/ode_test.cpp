#include <gtest/gtest.h>

#include <cmath>

#include "tolldag/codag.hpp"
#include "tolldag/dynamics.hpp"
#include "tolldag/equilibrium.hpp"
#include "tolldag/errors.hpp"
#include "tolldag/network_io.hpp"
#include "tolldag/tolling.hpp"

namespace tolldag {
namespace {

TEST(FlowOde, EquilibriumIsRestPoint) {
    const CoDag codag = build_codag(builtin_network("diamond"));
    const std::vector<double> p(codag.num_original_arcs(), 0.2);
    SimConfig cfg;
    cfg.xi0 = solve_equilibrium(codag, p, 10.0).xi_bar;
    const auto traj = integrate_flow_ode(codag, p, cfg, 2.0, 0.0, 100);
    EXPECT_LE(traj.terminal_error, 1e-8);
    const auto report = lyapunov_report(traj);
    EXPECT_LE(report.max_increase, 1e-12);
    EXPECT_TRUE(report.passed);
}

TEST(FlowOde, SymmetricParallelConverges) {
    const CoDag codag = build_codag(builtin_network("parallel2"));
    SimConfig cfg;
    cfg.xi0 = {0.9, 0.1};
    const auto traj = integrate_flow_ode(codag, std::vector<double>{0.0, 0.0}, cfg, 30.0, 0.0, 1000);
    EXPECT_NEAR(traj.w.back()[0], 0.5, 1e-8);
    EXPECT_NEAR(traj.w.back()[1], 0.5, 1e-8);
    EXPECT_TRUE(lyapunov_report(traj).passed);
}

TEST(FlowOde, DiamondMatchesSolver) {
    const CoDag codag = build_codag(builtin_network("diamond"));
    const std::vector<double> p(codag.num_original_arcs(), 0.0);
    const auto traj = integrate_flow_ode(codag, p, SimConfig{}, 40.0, 0.0, 1000);
    EXPECT_LE(traj.terminal_error, 1e-6);
    const auto report = lyapunov_report(traj);
    EXPECT_LE(report.max_increase, kFlowLyapunovTolerance);
    for (std::size_t k = 1; k < traj.F.size(); ++k) EXPECT_LE(traj.F[k], traj.F[k - 1] + 1e-8);
}

TEST(FlowOde, RejectsLargeStep) {
    const CoDag codag = build_codag(builtin_network("diamond"));
    const std::vector<double> p(codag.num_original_arcs(), 0.0);
    EXPECT_THROW(integrate_flow_ode(codag, p, SimConfig{}, 1.0, 0.05), StepTooLarge);
    EXPECT_THROW(integrate_flow_ode(codag, p, SimConfig{}, -1.0), InvalidOptions);
}

TEST(TollOde, StartAtOptimumStaysThere) {
    const CoDag codag = build_codag(builtin_network("diamond"));
    const auto ref = solve_reference(codag, 10.0, 1e-11);
    const auto traj = integrate_toll_ode(codag, ref.p_bar, 10.0, 2.0, 0.01,
                                         std::span<const double>(ref.p_bar));
    for (double v : traj.V) EXPECT_LE(v, 1e-18);
    EXPECT_EQ(traj.V[0], 0.0);
}

TEST(TollOde, SingleArcClosedForm) {
    const CoDag codag = build_codag(builtin_network("single_arc"));
    const auto traj = integrate_toll_ode(codag, std::vector<double>{0.0}, 10.0, 3.0, 0.01);
    // 2 (1 - e^-t) at t = 0.5, 1, 3.
    const std::pair<double, double> expected[] = {
        {0.5, 0.7869386805747332}, {1.0, 1.2642411176571154}, {3.0, 1.9004258632642721}};
    for (const auto& [t, p] : expected) {
        EXPECT_NEAR(2.0 * (1.0 - std::exp(-t)), p, 1e-15);
        bool found = false;
        for (std::size_t k = 0; k < traj.t.size(); ++k) {
            if (std::abs(traj.t[k] - t) < 1e-9) {
                EXPECT_NEAR(traj.p[k][0], p, 1e-6) << t;
                found = true;
            }
        }
        EXPECT_TRUE(found) << t;
    }
}

TEST(TollOde, DiamondContractsExponentially) {
    const CoDag codag = build_codag(builtin_network("diamond"));
    const std::vector<double> p0(codag.num_original_arcs(), 0.0);
    const auto traj = integrate_toll_ode(codag, p0, 10.0, 5.0, 0.01);
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        EXPECT_LE(traj.V[k], traj.V[0] * std::exp(-2.0 * traj.t[k]) * (1.0 + 1e-6)) << traj.t[k];
    }
    const auto report = lyapunov_report(traj);
    EXPECT_TRUE(report.passed);
    EXPECT_LE(report.fitted_rate, -2.0 + kTollRateSlack);
}

TEST(TollOde, NineArcFittedRate) {
    const CoDag codag = build_codag(builtin_network("nine_arc"));
    const std::vector<double> p0(codag.num_original_arcs(), 0.0);
    const auto report = lyapunov_report(integrate_toll_ode(codag, p0, 10.0, 4.0, 0.01));
    EXPECT_TRUE(report.passed);
    EXPECT_LE(report.fitted_rate, -2.0 + kTollRateSlack);
}

TEST(TollOde, StationaryReportHasNoIncrease) {
    TollOdeTrajectory traj;
    traj.t = {0.0, 0.1, 0.2};
    traj.V = {0.0, 0.0, 0.0};
    EXPECT_EQ(lyapunov_report(traj).max_increase, 0.0);
    FlowOdeTrajectory flow;
    flow.t = {0.0, 0.1};
    flow.F = {1.0, 1.0};
    EXPECT_EQ(lyapunov_report(flow).max_increase, 0.0);
    EXPECT_TRUE(lyapunov_report(flow).passed);
}

TEST(TollOde, RequiresAffineLatency) {
    OriginalNetwork net = builtin_network("parallel2");
    net.arcs[0].latency = LatencyFn::bpr(1.0, 1.0);
    const CoDag codag = build_codag(net);
    EXPECT_THROW(integrate_toll_ode(codag, std::vector<double>{0.0, 0.0}, 10.0, 1.0), NonAffineLatency);
}

}  // namespace
}  // namespace tolldag
