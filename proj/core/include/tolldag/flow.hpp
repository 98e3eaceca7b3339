#pragma once

#include <span>

#include "tolldag/choice.hpp"
#include "tolldag/codag.hpp"

namespace tolldag {

/// Forward sweep W_a = (g_{i_a} + sum of W over arcs entering i_a) * xi_a,
/// with g_i = demand at the origin and zero elsewhere.
ArcVector propagate_flows(const CoDag& codag, std::span<const double> xi, double demand);

/// Per-node uniform choice probabilities.
ChoiceProbs uniform_choice(const CoDag& codag);

/// xi_a = w_a / (sum of w over arcs leaving i_a).
ChoiceProbs split_fractions(const CoDag& codag, std::span<const double> w);

/// Largest violation of the flow polytope constraints: conservation at
/// interior nodes, origin outflow equal to demand, and nonnegativity.
double polytope_violation(const CoDag& codag, std::span<const double> w);

/// Largest deviation of a per-node sum of xi from one.
double simplex_violation(const CoDag& codag, std::span<const double> xi);

/// Minimum over routes of the summed arc weights, by dynamic programming
/// over the topological order.
double shortest_route_cost(const CoDag& codag, std::span<const double> weights);

}  // namespace tolldag
