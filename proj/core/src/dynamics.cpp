#include "tolldag/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tolldag/errors.hpp"

namespace tolldag {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double gain(const SimConfig& cfg, std::size_t node) {
    return cfg.K.empty() ? 1.0 : cfg.K[node];
}

double max_gain(const CoDag& codag, const SimConfig& cfg) {
    double k = 0.0;
    for (std::size_t i = 0; i + 1 < codag.num_nodes(); ++i) k = std::max(k, gain(cfg, i));
    return k;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
}

void require_affine(const CoDag& codag) {
    for (std::size_t k = 0; k < codag.num_original_arcs(); ++k) {
        if (!codag.network().arcs[k].latency.is_affine())
            throw NonAffineLatency("arc '" + codag.network().arcs[k].id +
                                   "' is not affine; the affine toll rule needs theta1");
    }
}

}  // namespace

std::vector<std::string> validate_config(const CoDag& codag, SimConfig& cfg) {
    std::vector<std::string> warnings;
    if (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta))
        throw InvalidOptions("beta must be positive and finite");
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw InvalidOptions("gamma must lie in (0, 1)");
    if (cfg.horizon < 0) throw InvalidOptions("horizon must be nonnegative");

    if (cfg.K.empty()) cfg.K.assign(codag.num_nodes(), 1.0);
    if (cfg.K.size() != codag.num_nodes())
        throw DimensionMismatch("K", codag.num_nodes(), cfg.K.size());
    for (double k : cfg.K) {
        if (!(k > 0.0) || !std::isfinite(k)) throw InvalidOptions("every K_i must be positive");
    }

    const bool zero_eta = cfg.eta_low == 0.0 && cfg.eta_high == 0.0;
    if (zero_eta && !cfg.allow_zero_eta)
        throw InvalidOptions("eta range [0, 0] freezes the choice dynamics");
    if (!zero_eta && !(cfg.eta_low >= 0.0 && cfg.eta_low < cfg.eta_high))
        throw InvalidOptions("eta range needs 0 <= eta_low < eta_high");
    const double kmax = max_gain(codag, cfg);
    if (!(cfg.eta_high * kmax < 1.0))
        throw InvalidOptions("eta_high must be below 1 / max K_i");
    const double mean_eta = 0.5 * (cfg.eta_low + cfg.eta_high);
    if (!zero_eta && cfg.gamma > 0.5 * mean_eta) {
        std::ostringstream msg;
        msg << "gamma = " << cfg.gamma << " exceeds half the mean step " << mean_eta
            << "; the toll update is not clearly slower than the choice update";
        warnings.push_back(msg.str());
    }

    if (cfg.xi0.empty()) cfg.xi0 = uniform_choice(codag);
    if (cfg.xi0.size() != codag.num_arcs())
        throw DimensionMismatch("xi0", codag.num_arcs(), cfg.xi0.size());
    for (double x : cfg.xi0) {
        if (!(x > 0.0) || !std::isfinite(x))
            throw InvalidOptions("initial choice probabilities must be strictly positive");
    }
    if (simplex_violation(codag, cfg.xi0) > 1e-12)
        throw InvalidOptions("initial choice probabilities must sum to one at every node");

    if (cfg.p0.empty()) cfg.p0.assign(codag.num_original_arcs(), 0.0);
    if (cfg.p0.size() != codag.num_original_arcs())
        throw DimensionMismatch("p0", codag.num_original_arcs(), cfg.p0.size());
    for (double p : cfg.p0) {
        if (!(p >= 0.0) || !std::isfinite(p))
            throw InvalidOptions("initial tolls must be nonnegative and finite");
    }

    if (cfg.toll_rule == TollRule::affine) require_affine(codag);
    return warnings;
}

std::vector<double> height_graded_gains(const CoDag& codag, double ratio) {
    if (!(ratio >= 1.0) || !std::isfinite(ratio))
        throw InvalidOptions("gain ratio must be finite and at least 1");
    std::vector<std::size_t> depth(codag.num_nodes(), 0);
    for (const CoDagArc& a : codag.arcs()) depth[a.head] = std::max(depth[a.head], depth[a.tail] + 1);
    std::vector<double> k(codag.num_nodes());
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = std::pow(ratio, static_cast<double>(depth[i]));
    return k;
}

TrajectoryBounds trajectory_bounds(const CoDag& codag, double beta,
                                   std::span<const double> p0) {
    TrajectoryBounds b;
    b.demand = codag.demand();
    b.toll_cap = toll_cap(codag, p0);
    double s_max = 0.0;
    for (const OriginalArc& arc : codag.network().arcs)
        s_max = std::max(s_max, arc.latency.value(codag.demand()));
    const double entropy_step = std::log(static_cast<double>(codag.num_arcs())) / beta;
    double c = s_max + b.toll_cap;
    for (std::size_t k = 1; k < codag.max_height(); ++k)
        c = std::max(s_max + b.toll_cap + c, entropy_step + c);
    b.cost_cap = c;
    return b;
}

void BoundMonitor::check(long step, std::span<const double> xi, std::span<const double> w,
                         std::span<const double> p, std::span<const double> z) {
    auto fail = [step](const std::string& what) {
        throw BoundViolation("step " + std::to_string(step) + ": " + what);
    };
    const double g = bounds_.demand;
    const double flow_slack = 1e-12 * g;
    for (std::size_t a = 0; a < w.size(); ++a) {
        if (!(w[a] > 0.0) || w[a] > g + flow_slack)
            fail("W[" + codag_.arc_id(a) + "] = " + std::to_string(w[a]) + " outside (0, g]");
    }
    const double cap = bounds_.toll_cap;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (!(p[k] >= 0.0) || p[k] > cap * (1.0 + 1e-12))
            fail("P[" + codag_.network().arcs[k].id + "] = " + std::to_string(p[k]) +
                 " outside [0, C_p]");
    }
    if (simplex_violation(codag_, xi) > 1e-12) fail("choice probabilities left the simplex");
    for (double x : xi) {
        if (!(x > 0.0)) fail("choice probability reached zero");
    }
    for (std::size_t a = 0; a < z.size(); ++a) {
        if (!(std::abs(z[a]) <= bounds_.cost_cap))
            fail("|z[" + codag_.arc_id(a) + "]| = " + std::to_string(std::abs(z[a])) +
                 " exceeds C_z");
    }
    if (polytope_violation(codag_, w) > 1e-9 * g) fail("flow left the polytope");
    ++checks_;
}

SimState initial_state(const CoDag& codag, const SimConfig& cfg) {
    SimState s;
    s.xi = cfg.xi0.empty() ? uniform_choice(codag) : cfg.xi0;
    s.W = propagate_flows(codag, s.xi, codag.demand());
    s.P = cfg.p0.empty() ? TollVector(codag.num_original_arcs(), 0.0) : cfg.p0;
    return s;
}

std::vector<double> draw_eta(const CoDag& codag, const SimConfig& cfg, const CounterRng& rng,
                             long step) {
    std::vector<double> eta(codag.num_nodes(), 0.0);
    const auto counter = static_cast<std::uint64_t>(step) + 1;
    for (std::size_t i = 0; i + 1 < codag.num_nodes(); ++i)
        eta[i] = rng.uniform(cfg.eta_low, cfg.eta_high, i, counter);
    return eta;
}

SimState step_with_eta(const SimState& state, const CoDag& codag, const SimConfig& cfg,
                       std::span<const double> eta, CostToGo* z) {
    if (cfg.toll_rule == TollRule::affine) require_affine(codag);
    CostToGo ctg = cost_to_go(codag, state.W, state.P, cfg.beta);
    const ChoiceProbs target = logit_probs(codag, ctg);

    SimState next;
    next.step = state.step + 1;
    next.xi.resize(codag.num_arcs());
    for (std::size_t a = 0; a < codag.num_arcs(); ++a) {
        const std::size_t i = codag.arc(a).tail;
        const double mix = eta[i] * gain(cfg, i);
        next.xi[a] = state.xi[a] + mix * (target[a] - state.xi[a]);
    }

    const ArcVector w_orig = aggregate_flow(codag, state.W);
    next.P.resize(state.P.size());
    for (std::size_t k = 0; k < state.P.size(); ++k) {
        const LatencyFn& fn = codag.network().arcs[k].latency;
        const double slope = cfg.toll_rule == TollRule::affine ? fn.as_affine()->theta1
                                                               : fn.derivative(w_orig[k]);
        next.P[k] = state.P[k] + cfg.gamma * (-state.P[k] + w_orig[k] * slope);
    }
    next.W = propagate_flows(codag, next.xi, codag.demand());

    if (!all_finite(next.xi) || !all_finite(next.P) || !all_finite(next.W))
        throw NonFiniteState("non-finite state after step " + std::to_string(next.step));
    if (z) *z = std::move(ctg);
    return next;
}

SimState step_discrete(const SimState& state, const CoDag& codag, const SimConfig& cfg,
                       const CounterRng& rng) {
    const std::vector<double> eta = draw_eta(codag, cfg, rng, state.step);
    return step_with_eta(state, codag, cfg, eta);
}

SimReference solve_reference(const CoDag& codag, double beta, double toll_tol) {
    TollOptions opts;
    opts.tol = toll_tol;
    const OptimalTollResult toll = solve_optimal_toll(codag, beta, opts);
    return {split_fractions(codag, toll.w_at_p_bar), toll.p_bar};
}

SimTrace simulate(const CoDag& codag, SimConfig cfg, std::optional<SimReference> reference) {
    validate_config(codag, cfg);
    if (reference) {
        if (reference->xi_bar.size() != codag.num_arcs())
            throw DimensionMismatch("reference xi", codag.num_arcs(), reference->xi_bar.size());
        if (reference->p_bar.size() != codag.num_original_arcs())
            throw DimensionMismatch("reference p", codag.num_original_arcs(),
                                    reference->p_bar.size());
    }
    const bool affine = std::all_of(codag.network().arcs.begin(), codag.network().arcs.end(),
                                    [](const OriginalArc& a) { return a.latency.is_affine(); });

    SimTrace trace;
    trace.config = cfg;
    trace.reference = reference;
    trace.bounds = trajectory_bounds(codag, cfg.beta, cfg.p0);
    BoundMonitor monitor(codag, trace.bounds);
    const CounterRng rng(cfg.seed);

    auto record = [&](const SimState& s) {
        SimRecord r;
        r.step = s.step;
        r.xi = s.xi;
        r.W = s.W;
        r.W_orig = aggregate_flow(codag, s.W);
        r.P = s.P;
        r.F = potential_F(codag, s.W, s.P, cfg.beta);
        if (reference) {
            r.dist_xi = squared_distance(s.xi, reference->xi_bar);
            r.dist_p = squared_distance(s.P, reference->p_bar);
            r.V = affine ? toll_lyapunov(codag, s.P, reference->p_bar) : kNaN;
        } else {
            r.dist_xi = r.dist_p = r.V = kNaN;
        }
        trace.records.push_back(std::move(r));
    };

    trace.records.reserve(static_cast<std::size_t>(cfg.horizon) + 1);
    SimState state = initial_state(codag, cfg);
    record(state);
    CostToGo z;
    for (long n = 0; n < cfg.horizon; ++n) {
        const std::vector<double> eta = draw_eta(codag, cfg, rng, state.step);
        SimState next = step_with_eta(state, codag, cfg, eta, &z);
        if (cfg.check_bounds) monitor.check(state.step, state.xi, state.W, state.P, z.z);
        state = std::move(next);
        record(state);
    }
    if (cfg.check_bounds) {
        z = cost_to_go(codag, state.W, state.P, cfg.beta);
        monitor.check(state.step, state.xi, state.W, state.P, z.z);
    }
    trace.bound_checks = monitor.checks();
    return trace;
}

double toll_lyapunov(const CoDag& codag, std::span<const double> p,
                     std::span<const double> p_bar) {
    if (p.size() != codag.num_original_arcs())
        throw DimensionMismatch("toll", codag.num_original_arcs(), p.size());
    if (p_bar.size() != codag.num_original_arcs())
        throw DimensionMismatch("reference toll", codag.num_original_arcs(), p_bar.size());
    require_affine(codag);
    double v = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double d = p[k] - p_bar[k];
        v += d * d / codag.network().arcs[k].latency.as_affine()->theta1;
    }
    return 0.5 * v;
}

}  // namespace tolldag
