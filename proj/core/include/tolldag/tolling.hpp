#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "tolldag/codag.hpp"
#include "tolldag/equilibrium.hpp"

namespace tolldag {

/// Per-original-arc tolls, in the same units as latency.
using TollVector = ArcVector;

/// C_p = max(max initial toll, demand * max_[a] s'_[a](demand)).
double toll_cap(const CoDag& codag, std::span<const double> initial_tolls = {});

/// |A_O| * demand * max_[a] s'_[a](demand): per-coordinate bound of the set
/// the marginal toll map sends into itself.
double marginal_toll_bound(const CoDag& codag);

/// Psi(p)_[a] = w_[a] * s'_[a](w_[a]) at w = the CoDAG equilibrium under p.
/// `warm_start` seeds the inner solve and receives its solution.
TollVector marginal_toll_map(const CoDag& codag, std::span<const double> p, double beta,
                             const EquilibriumOptions& inner = {},
                             ArcVector* warm_start = nullptr);

struct TollOptions {
    double tol = 1e-8;        ///< max-norm of p - Psi(p)
    double damping = 0.3;     ///< initial alpha
    long max_iter = 10'000;
    double social_tol = 1e-6;
    bool certify = true;      ///< compare against an independent social-optimum solve
};

struct OptimalTollResult {
    TollVector p_bar;
    FlowPolytopePoint w_at_p_bar;
    double fixed_point_residual = 0.0;
    /// Max-norm distance between aggregated flows at p_bar and at the social
    /// optimum; NaN when certification was skipped.
    double social_gap = 0.0;
    /// Max-norm distance per CoDAG arc.
    double social_gap_arcwise = 0.0;
    long iterations = 0;
};

/// Damped Picard iteration p <- (1 - alpha) p + alpha Psi(p) from `initial`
/// (zero by default). Throws NonConvergence, SocialGapViolation.
OptimalTollResult solve_optimal_toll(const CoDag& codag, double beta, const TollOptions& opts = {},
                                     std::optional<std::span<const double>> initial = std::nullopt);

struct MonotonicityReport {
    long trials = 0;
    /// max over trials of sum_a (w_a(p') - w_a(p)) (p'_[a] - p_[a])
    double max_inner_product = 0.0;
    bool passed = false;
};

inline constexpr double kMonotonicityTolerance = 1e-9;

/// Draws `trials` toll pairs uniformly from [0, C_p]^{|A_O|} and evaluates the
/// equilibrium inner product for each. Trials run concurrently.
MonotonicityReport check_monotonicity(const CoDag& codag, double beta, long trials,
                                      std::uint64_t seed = 1);

/// The inner product for one toll pair.
double monotonicity_inner_product(const CoDag& codag, double beta, std::span<const double> p,
                                  std::span<const double> p_prime,
                                  const EquilibriumOptions& inner = {});

}  // namespace tolldag
