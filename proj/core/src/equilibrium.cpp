#include "tolldag/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polytope_newton.hpp"
#include "tolldag/errors.hpp"
#include "tolldag/flow.hpp"

namespace tolldag {
namespace {

detail::LinkCost potential_link_cost(const CoDag& codag, std::span<const double> p) {
    const OriginalNetwork* net = &codag.network();
    ArcVector tolls(p.begin(), p.end());
    return detail::LinkCost{
        [net, tolls](std::size_t k, double x) { return net->arcs[k].latency.integral(x) + tolls[k] * x; },
        [net, tolls](std::size_t k, double x) { return net->arcs[k].latency.value(x) + tolls[k]; },
        [net](std::size_t k, double x) { return net->arcs[k].latency.derivative(x); },
    };
}

detail::LinkCost social_link_cost(const CoDag& codag) {
    const OriginalNetwork* net = &codag.network();
    return detail::LinkCost{
        [net](std::size_t k, double x) { return x * net->arcs[k].latency.value(x); },
        [net](std::size_t k, double x) {
            const auto& s = net->arcs[k].latency;
            return s.value(x) + x * s.derivative(x);
        },
        [net](std::size_t k, double x) {
            const auto& s = net->arcs[k].latency;
            return 2.0 * s.derivative(x) + x * s.second_derivative(x);
        },
    };
}

void check_tolls(const CoDag& codag, std::span<const double> p) {
    if (p.size() != codag.num_original_arcs()) {
        throw DimensionMismatch("toll vector", codag.num_original_arcs(), p.size());
    }
    for (double v : p) {
        if (!std::isfinite(v)) throw NonFiniteInput("toll vector contains a non-finite entry");
    }
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
    double worst = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) worst = std::max(worst, std::abs(x[k] - y[k]));
    return worst;
}

}  // namespace

double potential_F(const CoDag& codag, std::span<const double> w, std::span<const double> p,
                   double beta) {
    check_tolls(codag, p);
    if (w.size() != codag.num_arcs()) throw DimensionMismatch("potential_F", codag.num_arcs(), w.size());
    return detail::EntropicObjective(codag, potential_link_cost(codag, p), beta).value(w);
}

ArcVector potential_gradient(const CoDag& codag, std::span<const double> w,
                             std::span<const double> p, double beta) {
    check_tolls(codag, p);
    return detail::EntropicObjective(codag, potential_link_cost(codag, p), beta).gradient(w);
}

FlowPolytopePoint equilibrium_map(const CoDag& codag, std::span<const double> w,
                                  std::span<const double> p, double beta) {
    const CostToGo ctg = cost_to_go(codag, w, p, beta);
    return propagate_flows(codag, logit_probs(codag, ctg), codag.demand());
}

double vi_residual(const CoDag& codag, std::span<const double> w, std::span<const double> p,
                   double beta) {
    return detail::frank_wolfe_gap(codag, w, potential_gradient(codag, w, p, beta));
}

FlowPolytopePoint minimize_potential(const CoDag& codag, std::span<const double> p, double beta) {
    check_tolls(codag, p);
    if (!(beta > 0.0)) throw InvalidOptions("beta must be positive");
    const detail::EntropicObjective objective(codag, potential_link_cost(codag, p), beta);
    auto newton = detail::minimize_over_polytope(
        objective, propagate_flows(codag, uniform_choice(codag), codag.demand()));
    if (!(newton.gap <= EquilibriumOptions{}.gap_tol)) {
        throw NonConvergence("potential minimisation", newton.iterations, newton.gap);
    }
    return std::move(newton.w);
}

EquilibriumResult solve_equilibrium(const CoDag& codag, std::span<const double> p, double beta,
                                    const EquilibriumOptions& opts,
                                    std::optional<std::span<const double>> initial) {
    if (!(opts.tol > 0.0) || opts.max_iter <= 0 || !(opts.damping > 0.0 && opts.damping <= 1.0) ||
        !(opts.gap_tol > 0.0) || opts.stall_window <= 0) {
        throw InvalidOptions("equilibrium options out of range");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidOptions("beta must be positive and finite");
    check_tolls(codag, p);

    ArcVector w;
    if (initial) {
        if (initial->size() != codag.num_arcs()) {
            throw DimensionMismatch("initial flow", codag.num_arcs(), initial->size());
        }
        // Re-derive a strictly interior feasible point from the split fractions.
        w = propagate_flows(codag, split_fractions(codag, *initial), codag.demand());
        if (std::any_of(w.begin(), w.end(), [](double x) { return !(x > 0.0); })) {
            w = propagate_flows(codag, uniform_choice(codag), codag.demand());
        }
    } else {
        w = propagate_flows(codag, uniform_choice(codag), codag.demand());
    }

    EquilibriumResult result;
    double delta = opts.damping;
    double previous = std::numeric_limits<double>::infinity();
    double best = previous;
    long since_progress = 0;
    bool converged = false;

    for (long it = 0; it < opts.max_iter; ++it) {
        result.iterations = it + 1;
        const FlowPolytopePoint next = equilibrium_map(codag, w, p, beta);
        const double residual = max_abs_diff(next, w);
        result.fixed_point_residual = residual;
        if (residual <= opts.tol) {
            converged = true;
            break;
        }
        if (residual > previous) delta = std::max(0.5 * delta, 1e-6);
        if (residual < best * (1.0 - 1e-14)) {
            best = residual;
            since_progress = 0;
        } else if (++since_progress >= opts.stall_window) {
            break;
        }
        previous = residual;
        for (std::size_t a = 0; a < w.size(); ++a) w[a] += delta * (next[a] - w[a]);
    }

    // Arcs carrying ~tol flow are not resolved in relative terms by the
    // max-norm test, so a converged iterate can still fail the gap certificate.
    if (converged && !(vi_residual(codag, w, p, beta) <= opts.gap_tol)) converged = false;

    if (!converged) {
        const detail::EntropicObjective objective(codag, potential_link_cost(codag, p), beta);
        const auto newton = detail::minimize_over_polytope(objective, w);
        result.used_fallback = true;
        result.iterations += newton.iterations;
        w = newton.w;
        result.fixed_point_residual = max_abs_diff(equilibrium_map(codag, w, p, beta), w);
        if (!(result.fixed_point_residual <= opts.tol)) {
            throw NonConvergence("equilibrium", result.iterations, result.fixed_point_residual);
        }
    }

    result.vi_residual = vi_residual(codag, w, p, beta);
    if (!(result.vi_residual <= opts.gap_tol)) {
        throw NonConvergence("equilibrium optimality gap", result.iterations, result.vi_residual);
    }
    result.z = cost_to_go(codag, w, p, beta);
    result.xi_bar = split_fractions(codag, w);
    result.potential = potential_F(codag, w, p, beta);
    result.w_bar = std::move(w);
    return result;
}

double social_objective(const CoDag& codag, std::span<const double> w, double beta) {
    return detail::EntropicObjective(codag, social_link_cost(codag), beta).value(w);
}

SocialOptimumResult solve_social_optimum(const CoDag& codag, double beta,
                                         const SocialOptimumOptions& opts) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidOptions("beta must be positive and finite");
    const detail::EntropicObjective objective(codag, social_link_cost(codag), beta);
    auto newton = detail::minimize_over_polytope(
        objective, propagate_flows(codag, uniform_choice(codag), codag.demand()), opts.max_iter);
    if (!(newton.gap <= opts.gap_tol)) {
        throw NonConvergence("social optimum", newton.iterations, newton.gap);
    }
    return SocialOptimumResult{std::move(newton.w), newton.value, newton.gap, newton.iterations};
}

}  // namespace tolldag
