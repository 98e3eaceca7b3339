#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tolldag/dynamics.hpp"
#include "tolldag/errors.hpp"

namespace tolldag {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Absolute floor below which V differences are rounding noise from the inner
// equilibrium solves rather than dynamics.
constexpr double kTollLyapunovFloor = 1e-20;

template <class Rhs>
std::vector<double> rk4_step(const std::vector<double>& y, double dt, Rhs&& f) {
    const std::size_t n = y.size();
    std::vector<double> tmp(n);
    const std::vector<double> k1 = f(y);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    const std::vector<double> k2 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    const std::vector<double> k3 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
    const std::vector<double> k4 = f(tmp);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

long step_count(double t_end, double dt) {
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidOptions("t_end must be >= 0");
    if (!(dt > 0.0)) throw InvalidOptions("dt must be positive");
    return static_cast<long>(std::ceil(t_end / dt - 1e-9));
}

}  // namespace

FlowOdeTrajectory integrate_flow_ode(const CoDag& codag, std::span<const double> p,
                                     const SimConfig& cfg_in, double t_end, double dt,
                                     long record_every) {
    SimConfig cfg = cfg_in;
    if (cfg.K.empty()) cfg.K.assign(codag.num_nodes(), 1.0);
    if (cfg.K.size() != codag.num_nodes())
        throw DimensionMismatch("K", codag.num_nodes(), cfg.K.size());
    if (p.size() != codag.num_original_arcs())
        throw DimensionMismatch("toll", codag.num_original_arcs(), p.size());
    if (!(cfg.beta > 0.0)) throw InvalidOptions("beta must be positive");
    if (record_every < 1) throw InvalidOptions("record_every must be positive");
    double kmax = 0.0;
    for (std::size_t i = 0; i + 1 < codag.num_nodes(); ++i) kmax = std::max(kmax, cfg.K[i]);
    if (dt <= 0.0) dt = 1e-3 / kmax;
    if (dt > 0.01 / kmax * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "dt = " << dt << " exceeds 0.01 / max K = " << 0.01 / kmax;
        throw StepTooLarge(msg.str());
    }
    const long steps = step_count(t_end, dt);

    ChoiceProbs xi = cfg.xi0.empty() ? uniform_choice(codag) : cfg.xi0;
    if (xi.size() != codag.num_arcs()) throw DimensionMismatch("xi0", codag.num_arcs(), xi.size());
    const double g = codag.demand();

    auto rhs = [&](const std::vector<double>& x) {
        const ArcVector w = propagate_flows(codag, x, g);
        const ChoiceProbs target = logit_probs(codag, cost_to_go(codag, w, p, cfg.beta));
        std::vector<double> d(x.size());
        for (std::size_t a = 0; a < x.size(); ++a)
            d[a] = cfg.K[codag.arc(a).tail] * (target[a] - x[a]);
        return d;
    };

    FlowOdeTrajectory out;
    ArcVector w = propagate_flows(codag, xi, g);
    double f = potential_F(codag, w, p, cfg.beta);
    auto record = [&](double t) {
        out.t.push_back(t);
        out.xi.push_back(xi);
        out.w.push_back(w);
        out.F.push_back(f);
    };
    record(0.0);
    for (long n = 1; n <= steps; ++n) {
        const double h = std::min(dt, t_end - (n - 1) * dt);
        xi = rk4_step(xi, h, rhs);
        w = propagate_flows(codag, xi, g);
        for (double x : w) {
            if (!(x >= 0.0) || !std::isfinite(x))
                throw StepTooLarge("flow left the polytope at t = " + std::to_string(n * dt));
        }
        const double f_next = potential_F(codag, w, p, cfg.beta);
        if (f_next - f > kFlowLyapunovTolerance) {
            std::ostringstream msg;
            msg << "potential rose by " << f_next - f << " at t = " << (n - 1) * dt + h;
            throw StepTooLarge(msg.str());
        }
        f = f_next;
        if (n % record_every == 0 || n == steps) record((n - 1) * dt + h);
    }

    const EquilibriumResult eq = solve_equilibrium(codag, p, cfg.beta);
    out.w_equilibrium = eq.w_bar;
    double err = 0.0;
    for (std::size_t a = 0; a < w.size(); ++a) err = std::max(err, std::abs(w[a] - eq.w_bar[a]));
    out.terminal_error = err;
    return out;
}

TollOdeTrajectory integrate_toll_ode(const CoDag& codag, std::span<const double> p0, double beta,
                                     double t_end, double dt,
                                     std::optional<std::span<const double>> p_bar) {
    if (p0.size() != codag.num_original_arcs())
        throw DimensionMismatch("p0", codag.num_original_arcs(), p0.size());
    for (const OriginalArc& arc : codag.network().arcs) {
        if (!arc.latency.is_affine())
            throw NonAffineLatency("toll dynamics need affine latency on arc '" + arc.id + "'");
    }
    const long steps = step_count(t_end, dt);

    TollOdeTrajectory out;
    if (p_bar) {
        out.p_bar.assign(p_bar->begin(), p_bar->end());
    } else {
        TollOptions opts;
        opts.tol = 1e-11;
        opts.certify = false;
        out.p_bar = solve_optimal_toll(codag, beta, opts).p_bar;
    }

    EquilibriumOptions inner;
    inner.tol = 1e-13;
    ArcVector warm;
    auto rhs = [&](const std::vector<double>& p) {
        const EquilibriumResult eq =
            warm.empty() ? solve_equilibrium(codag, p, beta, inner)
                         : solve_equilibrium(codag, p, beta, inner, std::span<const double>(warm));
        warm = eq.w_bar;
        const ArcVector agg = aggregate_flow(codag, eq.w_bar);
        std::vector<double> d(p.size());
        for (std::size_t k = 0; k < p.size(); ++k)
            d[k] = -p[k] + agg[k] * codag.network().arcs[k].latency.as_affine()->theta1;
        return d;
    };

    std::vector<double> p(p0.begin(), p0.end());
    double v = toll_lyapunov(codag, p, out.p_bar);
    out.t.push_back(0.0);
    out.p.push_back(p);
    out.V.push_back(v);
    for (long n = 1; n <= steps; ++n) {
        const double h = std::min(dt, t_end - (n - 1) * dt);
        p = rk4_step(p, h, rhs);
        const double v_next = toll_lyapunov(codag, p, out.p_bar);
        if (v_next > v * std::exp(-2.0 * h) * (1.0 + 1e-6) + kTollLyapunovFloor) {
            std::ostringstream msg;
            msg << "V rose from " << v << " to " << v_next << " at t = " << (n - 1) * dt + h;
            throw LyapunovViolation(msg.str());
        }
        v = v_next;
        out.t.push_back((n - 1) * dt + h);
        out.p.push_back(p);
        out.V.push_back(v);
    }
    return out;
}

LyapunovReport lyapunov_report(const FlowOdeTrajectory& trajectory) {
    LyapunovReport r;
    r.values = trajectory.F;
    for (std::size_t k = 1; k < r.values.size(); ++k)
        r.max_increase = std::max(r.max_increase, r.values[k] - r.values[k - 1]);
    r.fitted_rate = kNaN;
    r.passed = r.max_increase <= kFlowLyapunovTolerance;
    return r;
}

LyapunovReport lyapunov_report(const TollOdeTrajectory& trajectory) {
    LyapunovReport r;
    r.values = trajectory.V;
    bool bounded = true;
    for (std::size_t k = 1; k < r.values.size(); ++k) {
        r.max_increase = std::max(r.max_increase, r.values[k] - r.values[k - 1]);
        const double dt = trajectory.t[k] - trajectory.t[k - 1];
        if (r.values[k] > r.values[k - 1] * std::exp(-2.0 * dt) * (1.0 + 1e-6) + kTollLyapunovFloor)
            bounded = false;
    }
    // Least-squares slope of ln V on the samples that sit above the noise floor.
    double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t k = 0; k < r.values.size(); ++k) {
        if (!(r.values[k] > 1e3 * kTollLyapunovFloor)) continue;
        const double t = trajectory.t[k];
        const double y = std::log(r.values[k]);
        n += 1;
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double denom = n * stt - st * st;
    r.fitted_rate = n >= 2 && denom > 0 ? (n * sty - st * sy) / denom : kNaN;
    const bool rate_ok = std::isnan(r.fitted_rate) || r.fitted_rate <= -2.0 + kTollRateSlack;
    r.passed = bounded && rate_ok;
    return r;
}

}  // namespace tolldag
