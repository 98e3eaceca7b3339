#include "polytope_newton.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "tolldag/errors.hpp"
#include "tolldag/flow.hpp"

namespace tolldag::detail {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double EntropicObjective::value(std::span<const double> w) const {
    const ArcVector agg = aggregate_flow(codag_, w);
    double total = 0.0;
    for (std::size_t k = 0; k < agg.size(); ++k) {
        if (!codag_.copies(k).empty()) total += link_.value(k, agg[k]);
    }
    const ArcVector out = node_outflow(codag_, w);
    double entropy = 0.0;
    for (std::size_t a = 0; a < w.size(); ++a) entropy += xlogx(w[a]);
    for (std::size_t i = 0; i < out.size(); ++i) entropy -= xlogx(out[i]);
    return total + entropy / beta_;
}

ArcVector EntropicObjective::gradient(std::span<const double> w) const {
    const ArcVector agg = aggregate_flow(codag_, w);
    const ArcVector out = node_outflow(codag_, w);
    ArcVector g(w.size());
    for (std::size_t a = 0; a < w.size(); ++a) {
        const CoDagArc& arc = codag_.arc(a);
        g[a] = link_.first(arc.original, agg[arc.original]) + std::log(w[a] / out[arc.tail]) / beta_;
    }
    return g;
}

std::vector<double> EntropicObjective::hessian(std::span<const double> w) const {
    const std::size_t n = w.size();
    const ArcVector agg = aggregate_flow(codag_, w);
    const ArcVector out = node_outflow(codag_, w);
    std::vector<double> h(n * n, 0.0);
    for (std::size_t k = 0; k < codag_.num_original_arcs(); ++k) {
        const auto copies = codag_.copies(k);
        if (copies.empty()) continue;
        const double curvature = link_.second(k, agg[k]);
        for (std::size_t a : copies) {
            for (std::size_t b : copies) h[a * n + b] += curvature;
        }
    }
    for (std::size_t i = 0; i < codag_.num_nodes(); ++i) {
        const auto arcs = codag_.outgoing(i);
        for (std::size_t a : arcs) {
            h[a * n + a] += 1.0 / (beta_ * w[a]);
            for (std::size_t b : arcs) h[a * n + b] -= 1.0 / (beta_ * out[i]);
        }
    }
    return h;
}

std::vector<double> EntropicObjective::column_scaled_hessian(std::span<const double> w) const {
    const std::size_t n = w.size();
    const ArcVector agg = aggregate_flow(codag_, w);
    const ArcVector out = node_outflow(codag_, w);
    std::vector<double> h(n * n, 0.0);
    for (std::size_t k = 0; k < codag_.num_original_arcs(); ++k) {
        const auto copies = codag_.copies(k);
        if (copies.empty()) continue;
        const double curvature = link_.second(k, agg[k]);
        for (std::size_t a : copies) {
            for (std::size_t b : copies) h[a * n + b] += curvature * w[b];
        }
    }
    for (std::size_t i = 0; i < codag_.num_nodes(); ++i) {
        const auto arcs = codag_.outgoing(i);
        for (std::size_t a : arcs) {
            h[a * n + a] += 1.0 / beta_;
            for (std::size_t b : arcs) h[a * n + b] -= w[b] / (beta_ * out[i]);
        }
    }
    return h;
}

double frank_wolfe_gap(const CoDag& codag, std::span<const double> w, std::span<const double> gradient) {
    double dot = 0.0;
    for (std::size_t a = 0; a < w.size(); ++a) dot += gradient[a] * w[a];
    const double gap = dot - codag.demand() * shortest_route_cost(codag, gradient);
    return std::isnan(gap) ? gap : std::max(0.0, gap);
}

NewtonResult minimize_over_polytope(const EntropicObjective& objective, ArcVector start, long max_iter) {
    const CoDag& codag = objective.codag();
    const std::size_t n = codag.num_arcs();
    const std::size_t m = codag.num_nodes() - 1;  // one balance row per non-destination node

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + m, n + m);
    for (std::size_t a = 0; a < n; ++a) {
        const CoDagArc& arc = codag.arc(a);
        kkt(a, n + arc.tail) = 1.0;
        if (arc.head != codag.destination()) kkt(a, n + arc.head) = -1.0;
    }

    NewtonResult result;
    // Every iterate is rebuilt from split fractions, so it is feasible by
    // construction and the Newton step only has to stay tangent.
    result.w = propagate_flows(codag, split_fractions(codag, start), codag.demand());
    ArcVector& w = result.w;
    double f = objective.value(w);

    // Newton steps are solved in the scaled variable u = step / w (columns of
    // the KKT matrix scaled by w). The entropy curvature 1/(beta w) then
    // becomes O(1), which keeps arcs with flows far below 1e-10 well posed.
    for (long it = 0; it < max_iter; ++it) {
        result.iterations = it + 1;
        const ArcVector g = objective.gradient(w);
        const std::vector<double> hd = objective.column_scaled_hessian(w);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) kkt(a, b) = hd[a * n + b];
        }
        // Balance rows are divided by the node outflow, so nodes that carry
        // almost no flow do not produce near-zero rows.
        const ArcVector out = node_outflow(codag, w);
        for (std::size_t a = 0; a < n; ++a) {
            const CoDagArc& arc = codag.arc(a);
            kkt(n + arc.tail, a) = w[a] / out[arc.tail];
            if (arc.head != codag.destination()) {
                kkt(n + arc.head, a) = -w[a] / out[arc.head];
            }
        }
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m);
        for (std::size_t a = 0; a < n; ++a) rhs(a) = -g[a];

        const Eigen::VectorXd u = kkt.partialPivLu().solve(rhs);
        Eigen::VectorXd step(n);
        double step_norm = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            step(a) = w[a] * u(a);
            step_norm = std::max(step_norm, std::abs(u(a)));
        }
        if (!std::isfinite(step_norm)) throw NonConvergence("polytope Newton", it, step_norm);
        // Stop on the relative step, which also sees arcs that carry almost
        // nothing.
        if (step_norm <= 1e-13) break;

        double t_max = 1.0;
        for (std::size_t a = 0; a < n; ++a) {
            if (u(a) < 0.0) t_max = std::min(t_max, -0.995 / u(a));
        }
        // F is convex along the step, so its minimiser there is the root of
        // the directional derivative. That derivative is built from log
        // ratios and stays informative where f itself no longer changes in
        // floating point, which happens as soon as some flows are tiny.
        ArcVector trial(n);
        auto slope_at = [&](double t, double& scale) {
            for (std::size_t a = 0; a < n; ++a) trial[a] = w[a] + t * step(a);
            const ArcVector gt = objective.gradient(trial);
            double d = 0.0;
            scale = 0.0;
            for (std::size_t a = 0; a < n; ++a) {
                d += gt[a] * step(a);
                scale += std::abs(gt[a] * step(a));
            }
            return d;
        };
        double scale = 0.0;
        double t = t_max;
        // Decrease predicted by the quadratic model. Once it is at the
        // rounding level of f the slope is noise, and the full step is taken.
        double model = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            double row = 0.0;
            for (std::size_t b = 0; b < n; ++b) row += hd[a * n + b] * u(b);
            model += step(a) * row;
        }
        const bool local = model <= 1e-10 * (1.0 + std::abs(f));
        if (!local && slope_at(t_max, scale) > 1e-12 * scale) {
            double lo = 0.0, hi = t_max;
            for (int k = 0; k < 100 && hi - lo > 1e-15 * t_max; ++k) {
                const double mid = 0.5 * (lo + hi);
                (slope_at(mid, scale) <= 0.0 ? lo : hi) = mid;
            }
            t = lo;
        }
        if (!(t > 0.0)) break;
        for (std::size_t a = 0; a < n; ++a) trial[a] = w[a] + t * step(a);
        // Rebuild the point from its split fractions. Balance then holds
        // exactly, also at nodes whose flow is far below the rounding error
        // of the larger arcs.
        trial = propagate_flows(codag, split_fractions(codag, trial), codag.demand());
        if (trial == w) break;
        w = trial;
        f = objective.value(w);
    }
    result.value = f;
    result.gap = frank_wolfe_gap(codag, w, objective.gradient(w));
    return result;
}

}  // namespace tolldag::detail
