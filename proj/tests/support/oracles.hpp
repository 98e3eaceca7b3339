#pragma once

// Independent reference computations used by the tests. Nothing here calls the
// solvers under test.

#include <functional>
#include <set>
#include <vector>

#include "tolldag/codag.hpp"
#include "tolldag/network.hpp"

namespace tolldag::testing {

/// Root of a sign-changing f on [lo, hi].
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-15);

/// Minimiser of a unimodal f on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi,
                      double tol = 1e-15);

/// Two parallel arcs o->d with s_1(w) = theta_1 w and s_2(w) = theta_2 w, unit demand.
OriginalNetwork two_arc_network(double theta_a, double theta_b);

/// Recursive DFS with a visited set.
std::set<Route> brute_force_routes(const OriginalNetwork& net);

/// Routes of the CoDAG as original-arc sequences, collected recursively.
std::set<Route> codag_route_set(const CoDag& codag);

/// -(1/beta) ln sum_routes exp(-beta * route cost), route cost summing
/// s(w_orig) + p over original arcs.
double route_logsumexp(const OriginalNetwork& net, const std::vector<double>& w_orig,
                       const std::vector<double>& p, double beta);

/// W_a = g * sum over origin-to-a prefixes of the product of xi along the
/// prefix (including a).
std::vector<double> route_product_flows(const CoDag& codag, const std::vector<double>& xi);

/// 1 + longest arc count from head(a) to the destination, by DP over a
/// topological order computed here with Kahn's algorithm.
std::vector<std::size_t> longest_downstream(const CoDag& codag);

}  // namespace tolldag::testing
