#include "tolldag/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tolldag/errors.hpp"

namespace tolldag {

ArcVector propagate_flows(const CoDag& codag, std::span<const double> xi, double demand) {
    if (xi.size() != codag.num_arcs()) throw DimensionMismatch("propagate_flows", codag.num_arcs(), xi.size());
    ArcVector inflow(codag.num_nodes(), 0.0);
    inflow[codag.origin()] = demand;
    ArcVector w(codag.num_arcs(), 0.0);
    // Arcs are sorted by tail in topological order, so each tail's inflow is final here.
    for (std::size_t a = 0; a < codag.num_arcs(); ++a) {
        const CoDagArc& arc = codag.arc(a);
        w[a] = inflow[arc.tail] * xi[a];
        inflow[arc.head] += w[a];
    }
    return w;
}

ChoiceProbs uniform_choice(const CoDag& codag) {
    ChoiceProbs xi(codag.num_arcs(), 0.0);
    for (std::size_t i = 0; i < codag.num_nodes(); ++i) {
        const auto out = codag.outgoing(i);
        for (std::size_t a : out) xi[a] = 1.0 / static_cast<double>(out.size());
    }
    return xi;
}

ChoiceProbs split_fractions(const CoDag& codag, std::span<const double> w) {
    const ArcVector outflow = node_outflow(codag, w);
    ChoiceProbs xi(codag.num_arcs(), 0.0);
    for (std::size_t a = 0; a < codag.num_arcs(); ++a) {
        const double total = outflow[codag.arc(a).tail];
        xi[a] = total > 0.0 ? w[a] / total
                            : 1.0 / static_cast<double>(codag.outgoing(codag.arc(a).tail).size());
    }
    return xi;
}

double polytope_violation(const CoDag& codag, std::span<const double> w) {
    if (w.size() != codag.num_arcs()) throw DimensionMismatch("polytope_violation", codag.num_arcs(), w.size());
    ArcVector balance(codag.num_nodes(), 0.0);
    double worst = 0.0;
    for (std::size_t a = 0; a < codag.num_arcs(); ++a) {
        balance[codag.arc(a).tail] += w[a];
        balance[codag.arc(a).head] -= w[a];
        worst = std::max(worst, -w[a]);
    }
    for (std::size_t i = 0; i < codag.num_nodes(); ++i) {
        if (i == codag.destination()) continue;
        const double target = i == codag.origin() ? codag.demand() : 0.0;
        worst = std::max(worst, std::abs(balance[i] - target));
    }
    return worst;
}

double simplex_violation(const CoDag& codag, std::span<const double> xi) {
    double worst = 0.0;
    for (std::size_t i = 0; i < codag.num_nodes(); ++i) {
        const auto out = codag.outgoing(i);
        if (out.empty()) continue;
        double sum = 0.0;
        for (std::size_t a : out) sum += xi[a];
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
}

double shortest_route_cost(const CoDag& codag, std::span<const double> weights) {
    ArcVector dist(codag.num_nodes(), std::numeric_limits<double>::infinity());
    dist[codag.origin()] = 0.0;
    for (std::size_t a = 0; a < codag.num_arcs(); ++a) {
        const CoDagArc& arc = codag.arc(a);
        dist[arc.head] = std::min(dist[arc.head], dist[arc.tail] + weights[a]);
    }
    return dist[codag.destination()];
}

}  // namespace tolldag
