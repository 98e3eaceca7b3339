#pragma once

#include <optional>
#include <span>

#include "tolldag/choice.hpp"
#include "tolldag/codag.hpp"

namespace tolldag {

/// Point of the flow polytope W: per CoDAG arc, conserving flow at interior
/// nodes, with origin outflow equal to the demand.
using FlowPolytopePoint = ArcVector;

struct EquilibriumOptions {
    double tol = 1e-10;        ///< max-norm fixed-point residual
    long max_iter = 100'000;
    double damping = 0.5;      ///< initial delta in (0, 1]
    double gap_tol = 1e-6;     ///< required first-order optimality gap
    long stall_window = 100;   ///< iterations without relative progress before the fallback
};

struct EquilibriumResult {
    FlowPolytopePoint w_bar;
    ChoiceProbs xi_bar;
    CostToGo z;
    double potential = 0.0;
    double vi_residual = 0.0;
    double fixed_point_residual = 0.0;
    long iterations = 0;
    bool used_fallback = false;
};

/// F(w, p) = sum_[a] int_0^{w_[a]} (s_[a] + p_[a]) + (1/beta) * node entropy.
/// Throws NegativeFlow.
double potential_F(const CoDag& codag, std::span<const double> w, std::span<const double> p,
                   double beta);

/// Gradient of F: s_[a](w_[a]) + p_[a] + (1/beta) ln(w_a / sum_{a' in A_{i_a}^+} w_a').
ArcVector potential_gradient(const CoDag& codag, std::span<const double> w,
                             std::span<const double> p, double beta);

/// One backward-forward pass: costs-to-go at w, logit split, flow propagation.
FlowPolytopePoint equilibrium_map(const CoDag& codag, std::span<const double> w,
                                  std::span<const double> p, double beta);

/// max over v in W of grad F(w)^T (w - v).
double vi_residual(const CoDag& codag, std::span<const double> w, std::span<const double> p,
                   double beta);

/// CoDAG equilibrium at toll p: damped fixed-point iteration on
/// equilibrium_map, falling back to constrained Newton descent on F when the
/// residual stalls. Throws NonConvergence, InvalidOptions.
EquilibriumResult solve_equilibrium(const CoDag& codag, std::span<const double> p, double beta,
                                    const EquilibriumOptions& opts = {},
                                    std::optional<std::span<const double>> initial = std::nullopt);

/// Minimises F(., p) over W directly by constrained Newton descent, without
/// the fixed-point iteration. Throws NonConvergence if the optimality gap
/// stays above the default gap_tol.
FlowPolytopePoint minimize_potential(const CoDag& codag, std::span<const double> p, double beta);

struct SocialOptimumOptions {
    long max_iter = 500;
    double gap_tol = 1e-6;
};

struct SocialOptimumResult {
    FlowPolytopePoint w;
    double objective = 0.0;
    double gap = 0.0;
    long iterations = 0;
};

/// sum_[a] w_[a] s_[a](w_[a]) + (1/beta) * node entropy.
double social_objective(const CoDag& codag, std::span<const double> w, double beta);

/// Perturbed socially optimal flow. Throws NonConvergence.
SocialOptimumResult solve_social_optimum(const CoDag& codag, double beta,
                                         const SocialOptimumOptions& opts = {});

}  // namespace tolldag
