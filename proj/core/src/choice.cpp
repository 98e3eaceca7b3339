#include "tolldag/choice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tolldag/errors.hpp"

namespace tolldag {
namespace {

void require_finite(std::span<const double> v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw NonFiniteInput(std::string(what) + " contains a non-finite entry");
    }
}

}  // namespace

double latency(const LatencyFn& fn, double w) { return fn.value(w); }

double marginal_latency(const LatencyFn& fn, double w) { return fn.derivative(w); }

double softmin(std::span<const double> z, double beta) {
    const double lo = *std::min_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(-beta * (v - lo));
    return lo - std::log(sum) / beta;
}

void softmax_into(std::span<const double> z, double beta, std::span<double> out) {
    const double lo = *std::min_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        out[k] = std::exp(-beta * (z[k] - lo));
        sum += out[k];
    }
    for (std::size_t k = 0; k < z.size(); ++k) out[k] /= sum;
}

CostToGo cost_to_go(const CoDag& codag, std::span<const double> w, std::span<const double> p,
                    double beta) {
    if (w.size() != codag.num_arcs()) throw DimensionMismatch("cost_to_go flows", codag.num_arcs(), w.size());
    if (p.size() != codag.num_original_arcs()) {
        throw DimensionMismatch("cost_to_go tolls", codag.num_original_arcs(), p.size());
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidOptions("beta must be positive and finite");
    require_finite(w, "flow vector");
    require_finite(p, "toll vector");

    const ArcVector aggregated = aggregate_flow(codag, w);
    const auto& net = codag.network();

    CostToGo out;
    out.beta = beta;
    out.z.assign(codag.num_arcs(), 0.0);
    out.phi.assign(codag.num_nodes(), 0.0);

    std::vector<double> scratch;
    for (std::size_t i = codag.num_nodes(); i-- > 0;) {
        if (i == codag.destination()) continue;
        const auto out_arcs = codag.outgoing(i);
        scratch.resize(out_arcs.size());
        for (std::size_t k = 0; k < out_arcs.size(); ++k) {
            const CoDagArc& arc = codag.arc(out_arcs[k]);
            const double cost = net.arcs[arc.original].latency.value(aggregated[arc.original]) +
                                p[arc.original];
            out.z[out_arcs[k]] = cost + out.phi[arc.head];
            scratch[k] = out.z[out_arcs[k]];
        }
        out.phi[i] = softmin(scratch, beta);
    }
    return out;
}

ChoiceProbs logit_probs(const CoDag& codag, const CostToGo& ctg) {
    require_finite(ctg.z, "cost-to-go");
    ChoiceProbs xi(codag.num_arcs(), 0.0);
    std::vector<double> z_local;
    std::vector<double> p_local;
    for (std::size_t i = 0; i < codag.num_nodes(); ++i) {
        const auto out_arcs = codag.outgoing(i);
        if (out_arcs.empty()) continue;
        z_local.resize(out_arcs.size());
        p_local.resize(out_arcs.size());
        for (std::size_t k = 0; k < out_arcs.size(); ++k) z_local[k] = ctg.z[out_arcs[k]];
        softmax_into(z_local, ctg.beta, p_local);
        for (std::size_t k = 0; k < out_arcs.size(); ++k) xi[out_arcs[k]] = p_local[k];
    }
    return xi;
}

}  // namespace tolldag
