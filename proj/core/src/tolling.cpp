#include "tolldag/tolling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tolldag/errors.hpp"
#include "tolldag/parallel.hpp"
#include "tolldag/rng.hpp"

namespace tolldag {
namespace {

double max_marginal_at_demand(const CoDag& codag) {
    double worst = 0.0;
    for (const auto& arc : codag.network().arcs) {
        worst = std::max(worst, arc.latency.derivative(codag.demand()));
    }
    return worst;
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
    double worst = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) worst = std::max(worst, std::abs(x[k] - y[k]));
    return worst;
}

}  // namespace

double toll_cap(const CoDag& codag, std::span<const double> initial_tolls) {
    double cap = codag.demand() * max_marginal_at_demand(codag);
    for (double p : initial_tolls) cap = std::max(cap, p);
    return cap;
}

double marginal_toll_bound(const CoDag& codag) {
    return static_cast<double>(codag.num_original_arcs()) * codag.demand() *
           max_marginal_at_demand(codag);
}

TollVector marginal_toll_map(const CoDag& codag, std::span<const double> p, double beta,
                             const EquilibriumOptions& inner, ArcVector* warm_start) {
    std::optional<std::span<const double>> seed;
    if (warm_start != nullptr && warm_start->size() == codag.num_arcs()) seed = *warm_start;
    EquilibriumResult eq = solve_equilibrium(codag, p, beta, inner, seed);
    const ArcVector agg = aggregate_flow(codag, eq.w_bar);
    TollVector psi(codag.num_original_arcs());
    for (std::size_t k = 0; k < psi.size(); ++k) {
        psi[k] = agg[k] * codag.network().arcs[k].latency.derivative(agg[k]);
    }
    if (warm_start != nullptr) *warm_start = std::move(eq.w_bar);
    return psi;
}

OptimalTollResult solve_optimal_toll(const CoDag& codag, double beta, const TollOptions& opts,
                                     std::optional<std::span<const double>> initial) {
    if (!(opts.tol > 0.0) || !(opts.damping > 0.0 && opts.damping <= 1.0) || opts.max_iter <= 0) {
        throw InvalidOptions("toll options out of range");
    }
    EquilibriumOptions inner;
    inner.tol = 0.01 * opts.tol;

    TollVector p(codag.num_original_arcs(), 0.0);
    if (initial) {
        if (initial->size() != p.size()) throw DimensionMismatch("initial toll", p.size(), initial->size());
        p.assign(initial->begin(), initial->end());
    }

    OptimalTollResult result;
    ArcVector warm;
    double alpha = opts.damping;
    double previous = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (long it = 0; it < opts.max_iter; ++it) {
        result.iterations = it + 1;
        const TollVector psi = marginal_toll_map(codag, p, beta, inner, &warm);
        const double residual = max_abs_diff(p, psi);
        result.fixed_point_residual = residual;
        if (residual <= opts.tol) {
            converged = true;
            // One undamped step: Psi(p) is at least as close to the fixed
            // point as p when the map contracts.
            ArcVector polished_w = warm;
            const TollVector psi2 = marginal_toll_map(codag, psi, beta, inner, &polished_w);
            const double polished = max_abs_diff(psi, psi2);
            if (polished <= residual) {
                p = psi;
                warm = std::move(polished_w);
                result.fixed_point_residual = polished;
            }
            break;
        }
        if (residual > previous) alpha = std::max(0.5 * alpha, 1e-4);
        previous = residual;
        for (std::size_t k = 0; k < p.size(); ++k) p[k] += alpha * (psi[k] - p[k]);
    }
    if (!converged) {
        throw NonConvergence("optimal toll", result.iterations, result.fixed_point_residual);
    }
    result.p_bar = std::move(p);
    result.w_at_p_bar = std::move(warm);

    result.social_gap = std::numeric_limits<double>::quiet_NaN();
    result.social_gap_arcwise = std::numeric_limits<double>::quiet_NaN();
    if (opts.certify) {
        const SocialOptimumResult social = solve_social_optimum(codag, beta);
        result.social_gap = max_abs_diff(aggregate_flow(codag, result.w_at_p_bar),
                                         aggregate_flow(codag, social.w));
        result.social_gap_arcwise = max_abs_diff(result.w_at_p_bar, social.w);
        if (!(result.social_gap <= opts.social_tol)) throw SocialGapViolation(result.social_gap);
    }
    return result;
}

double monotonicity_inner_product(const CoDag& codag, double beta, std::span<const double> p,
                                  std::span<const double> p_prime, const EquilibriumOptions& inner) {
    const EquilibriumResult at_p = solve_equilibrium(codag, p, beta, inner);
    const EquilibriumResult at_p_prime = solve_equilibrium(codag, p_prime, beta, inner, at_p.w_bar);
    double sum = 0.0;
    for (std::size_t a = 0; a < codag.num_arcs(); ++a) {
        const std::size_t k = codag.arc(a).original;
        sum += (at_p_prime.w_bar[a] - at_p.w_bar[a]) * (p_prime[k] - p[k]);
    }
    return sum;
}

MonotonicityReport check_monotonicity(const CoDag& codag, double beta, long trials,
                                      std::uint64_t seed) {
    if (trials < 1) throw InvalidOptions("monotonicity check needs at least one trial");
    const double cap = toll_cap(codag);
    const std::size_t n = codag.num_original_arcs();
    const CounterRng rng(seed);

    EquilibriumOptions inner;
    inner.tol = 1e-12;

    std::vector<double> products(static_cast<std::size_t>(trials));
    parallel_for(products.size(), [&](std::size_t t) {
        TollVector p(n);
        TollVector p_prime(n);
        for (std::size_t k = 0; k < n; ++k) {
            p[k] = cap * rng.uniform01(2 * t, k);
            p_prime[k] = cap * rng.uniform01(2 * t + 1, k);
        }
        products[t] = monotonicity_inner_product(codag, beta, p, p_prime, inner);
    });

    MonotonicityReport report;
    report.trials = trials;
    report.max_inner_product = *std::max_element(products.begin(), products.end());
    report.passed = report.max_inner_product <= kMonotonicityTolerance;
    return report;
}

}  // namespace tolldag
