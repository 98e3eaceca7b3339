#pragma once

#include <span>
#include <vector>

#include "tolldag/codag.hpp"
#include "tolldag/latency.hpp"

namespace tolldag {

/// Per-CoDAG-arc logit choice probabilities; they sum to one over the
/// outgoing arcs of each non-destination node.
using ChoiceProbs = ArcVector;

/// Logit expected minimum cost-to-go.
struct CostToGo {
    ArcVector z;    ///< per CoDAG arc
    ArcVector phi;  ///< per CoDAG node; zero at the destination
    double beta = 0.0;
};

/// s(w); NegativeFlow for w < 0.
double latency(const LatencyFn& fn, double w);
/// ds/dw; NegativeFlow for w < 0.
double marginal_latency(const LatencyFn& fn, double w);

/// -(1/beta) * ln(sum exp(-beta * z)), evaluated with max-subtraction.
double softmin(std::span<const double> z, double beta);

/// exp(-beta z_k) / sum exp(-beta z), evaluated with max-subtraction.
void softmax_into(std::span<const double> z, double beta, std::span<double> out);

/// Backward logit recursion over the CoDAG:
///   z_a = s_[a](w_[a]) + p_[a] + phi_{j_a},  phi_d = 0,
///   phi_i = softmin({z_a : a leaves i}).
/// `w` is per CoDAG arc and `p` per original arc.
CostToGo cost_to_go(const CoDag& codag, std::span<const double> w, std::span<const double> p,
                    double beta);

/// Per-node softmax of -beta z.
ChoiceProbs logit_probs(const CoDag& codag, const CostToGo& ctg);

}  // namespace tolldag
