#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tolldag/choice.hpp"
#include "tolldag/codag.hpp"
#include "tolldag/flow.hpp"
#include "tolldag/rng.hpp"
#include "tolldag/tolling.hpp"

namespace tolldag {

enum class TollRule {
    affine,    ///< P <- P + gamma (-P + W_[a] theta_[a],1); requires affine latencies
    marginal,  ///< P <- P + gamma (-P + W_[a] s'_[a](W_[a])); any latency
};

struct SimConfig {
    double beta = 10.0;
    double gamma = 0.02;
    double eta_low = 0.0;
    double eta_high = 0.1;
    /// Per CoDAG node gain K_i; empty means 1 everywhere.
    std::vector<double> K;
    long horizon = 2000;
    std::uint64_t seed = 7;
    /// Initial choice probabilities; empty means uniform per node.
    ChoiceProbs xi0;
    /// Initial tolls; empty means zero.
    TollVector p0;
    TollRule toll_rule = TollRule::affine;
    /// Test hook: admits eta_low = eta_high = 0.
    bool allow_zero_eta = false;
    bool check_bounds = true;
};

/// Checks the configuration against the CoDAG and fills defaults. Throws
/// InvalidOptions for hard violations; returns human-readable warnings for
/// soft ones (gamma not well below the mean step).
std::vector<std::string> validate_config(const CoDag& codag, SimConfig& cfg);

/// Per-node gains K_i = ratio^depth(i), with depth the longest arc count from
/// the origin, so downstream nodes adapt faster.
std::vector<double> height_graded_gains(const CoDag& codag, double ratio);

/// Uniform bounds along trajectories.
struct TrajectoryBounds {
    double demand = 0.0;
    double toll_cap = 0.0;  ///< C_p
    double cost_cap = 0.0;  ///< C_z, by recursion over arc heights
};

/// C_z: C_{z,1} = max s(g) + C_p and
/// C_{z,k+1} = max(max s(g) + C_p + C_{z,k}, ln|A| / beta + C_{z,k}).
TrajectoryBounds trajectory_bounds(const CoDag& codag, double beta, std::span<const double> p0);

/// Counts checks and aborts with BoundViolation on the first failure.
class BoundMonitor {
public:
    BoundMonitor(const CoDag& codag, TrajectoryBounds bounds) : codag_(codag), bounds_(bounds) {}

    /// W_a in (0, g], P in [0, C_p], simplex sums 1, |z_a| <= C_z.
    void check(long step, std::span<const double> xi, std::span<const double> w,
               std::span<const double> p, std::span<const double> z);

    long checks() const noexcept { return checks_; }
    const TrajectoryBounds& bounds() const noexcept { return bounds_; }

private:
    const CoDag& codag_;
    TrajectoryBounds bounds_;
    long checks_ = 0;
};

struct SimState {
    long step = 0;
    ChoiceProbs xi;
    ArcVector W;  ///< per CoDAG arc
    TollVector P;
};

SimState initial_state(const CoDag& codag, const SimConfig& cfg);

/// eta_i[n+1] for every CoDAG node, drawn from the (node, step) substream.
std::vector<double> draw_eta(const CoDag& codag, const SimConfig& cfg, const CounterRng& rng,
                             long step);

/// One step of the perturbed best-response and toll dynamics with given
/// per-node step sizes. `z` receives the costs-to-go at the pre-step state.
SimState step_with_eta(const SimState& state, const CoDag& codag, const SimConfig& cfg,
                       std::span<const double> eta, CostToGo* z = nullptr);

/// One step with eta drawn from `rng` at the state's step index. Throws
/// NonAffineLatency, NonFiniteState.
SimState step_discrete(const SimState& state, const CoDag& codag, const SimConfig& cfg,
                       const CounterRng& rng);

/// Reference point for distance diagnostics.
struct SimReference {
    ChoiceProbs xi_bar;
    TollVector p_bar;
};

/// Solves for (xi_bar(p_bar), p_bar).
SimReference solve_reference(const CoDag& codag, double beta, double toll_tol = 1e-10);

struct SimRecord {
    long step = 0;
    ChoiceProbs xi;
    ArcVector W;
    ArcVector W_orig;
    TollVector P;
    double dist_xi = 0.0;  ///< ||xi - xi_bar||^2, NaN without reference
    double dist_p = 0.0;   ///< ||P - p_bar||^2, NaN without reference
    double F = 0.0;        ///< potential at (W, P)
    double V = 0.0;        ///< 0.5 (P - p_bar)^T D^-1 (P - p_bar), NaN without reference
};

struct SimTrace {
    SimConfig config;
    std::optional<SimReference> reference;
    std::vector<SimRecord> records;  ///< horizon + 1 entries, step 0 first
    long bound_checks = 0;
    TrajectoryBounds bounds;
};

SimTrace simulate(const CoDag& codag, SimConfig cfg,
                  std::optional<SimReference> reference = std::nullopt);

// Continuous-time dynamics.

struct FlowOdeTrajectory {
    std::vector<double> t;
    std::vector<ChoiceProbs> xi;
    std::vector<ArcVector> w;
    std::vector<double> F;
    FlowPolytopePoint w_equilibrium;
    double terminal_error = 0.0;  ///< ||w(t_end) - w_bar(p)||_inf
};

/// Fixed-step RK4 on d xi_a/dt = K_{i_a} (-xi_a + logit_a(z(w(xi), p))).
/// dt <= 0 selects 1e-3 / max K. Throws StepTooLarge when dt exceeds
/// 0.01 / max K or F rises by more than 1e-8 in one step.
FlowOdeTrajectory integrate_flow_ode(const CoDag& codag, std::span<const double> p,
                                     const SimConfig& cfg, double t_end, double dt = 0.0,
                                     long record_every = 1);

struct TollOdeTrajectory {
    std::vector<double> t;
    std::vector<TollVector> p;
    std::vector<double> V;
    TollVector p_bar;
};

/// Fixed-step RK4 on dp_[a]/dt = -p_[a] + w_bar_[a](p) theta_[a],1. Throws
/// LyapunovViolation if V(t + dt) > V(t) exp(-2 dt) (1 + 1e-6),
/// NonAffineLatency for non-affine arcs.
TollOdeTrajectory integrate_toll_ode(const CoDag& codag, std::span<const double> p0, double beta,
                                     double t_end, double dt = 0.01,
                                     std::optional<std::span<const double>> p_bar = std::nullopt);

/// V(p) = 0.5 (p - p_bar)^T D^-1 (p - p_bar), D = diag(theta_[a],1).
double toll_lyapunov(const CoDag& codag, std::span<const double> p, std::span<const double> p_bar);

struct LyapunovReport {
    std::vector<double> values;
    double max_increase = 0.0;
    /// Slope of ln V against t (toll trajectories only; NaN otherwise).
    double fitted_rate = 0.0;
    bool passed = false;
};

inline constexpr double kFlowLyapunovTolerance = 1e-8;
inline constexpr double kTollRateSlack = 0.05;

/// F nonincreasing within 1e-8 per step.
LyapunovReport lyapunov_report(const FlowOdeTrajectory& trajectory);
/// V decays at fitted exponential rate at least 2 - 0.05 and never rises.
LyapunovReport lyapunov_report(const TollOdeTrajectory& trajectory);

}  // namespace tolldag
