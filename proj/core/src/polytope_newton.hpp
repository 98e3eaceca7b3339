#pragma once

#include <functional>
#include <span>

#include "tolldag/codag.hpp"

namespace tolldag::detail {

/// Separable cost on aggregated original-arc flows: sum_[a] L_[a](w_[a]).
struct LinkCost {
    std::function<double(std::size_t, double)> value;
    std::function<double(std::size_t, double)> first;
    std::function<double(std::size_t, double)> second;
};

/// Link cost plus (1/beta) * sum_i [sum_{a in A_i^+} w_a ln w_a - W_i ln W_i].
class EntropicObjective {
public:
    EntropicObjective(const CoDag& codag, LinkCost link, double beta)
        : codag_(codag), link_(std::move(link)), beta_(beta) {}

    double value(std::span<const double> w) const;
    ArcVector gradient(std::span<const double> w) const;
    /// Row-major dense Hessian.
    std::vector<double> hessian(std::span<const double> w) const;
    /// H diag(w), formed without dividing by w so that near-zero flows stay finite.
    std::vector<double> column_scaled_hessian(std::span<const double> w) const;

    const CoDag& codag() const noexcept { return codag_; }
    double beta() const noexcept { return beta_; }

private:
    const CoDag& codag_;
    LinkCost link_;
    double beta_;
};

/// x ln x with the continuous extension 0 at x = 0.
double xlogx(double x);

/// First-order optimality gap max_{v in W} g(w)^T (w - v), where g is the
/// objective gradient; zero exactly at the minimiser.
double frank_wolfe_gap(const CoDag& codag, std::span<const double> w, std::span<const double> gradient);

struct NewtonResult {
    ArcVector w;
    double value = 0.0;
    double gap = 0.0;
    long iterations = 0;
};

/// Equality-constrained Newton descent over the flow polytope with an exact
/// line search on the directional derivative; iterates stay strictly positive
/// and feasible. `start` must be
/// a strictly positive point of the polytope.
NewtonResult minimize_over_polytope(const EntropicObjective& objective, ArcVector start,
                                    long max_iter = 500);

}  // namespace tolldag::detail
