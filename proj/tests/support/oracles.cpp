#include "support/oracles.hpp"

#include <cmath>
#include <functional>
#include <queue>

namespace tolldag::testing {

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
    double flo = f(lo);
    for (int it = 0; it < 400 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 400 && b - a > tol; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

OriginalNetwork two_arc_network(double theta_a, double theta_b) {
    OriginalNetwork net;
    net.nodes = {"o", "d"};
    net.origin = 0;
    net.destination = 1;
    net.demand = 1.0;
    net.arcs.push_back({"a1", 0, 1, LatencyFn::affine(theta_a, 0.0)});
    net.arcs.push_back({"a2", 0, 1, LatencyFn::affine(theta_b, 0.0)});
    return net;
}

std::set<Route> brute_force_routes(const OriginalNetwork& net) {
    std::set<Route> out;
    std::vector<bool> visited(net.num_nodes(), false);
    Route path;
    std::function<void(std::size_t)> walk = [&](std::size_t node) {
        if (node == net.destination) {
            out.insert(path);
            return;
        }
        visited[node] = true;
        for (std::size_t k = 0; k < net.num_arcs(); ++k) {
            const OriginalArc& a = net.arcs[k];
            if (a.tail != node || visited[a.head]) continue;
            path.push_back(k);
            walk(a.head);
            path.pop_back();
        }
        visited[node] = false;
    };
    walk(net.origin);
    return out;
}

std::set<Route> codag_route_set(const CoDag& codag) {
    std::set<Route> out;
    Route path;
    std::function<void(std::size_t)> walk = [&](std::size_t node) {
        if (node == codag.destination()) {
            out.insert(path);
            return;
        }
        for (std::size_t a : codag.outgoing(node)) {
            path.push_back(codag.arc(a).original);
            walk(codag.arc(a).head);
            path.pop_back();
        }
    };
    walk(codag.origin());
    return out;
}

double route_logsumexp(const OriginalNetwork& net, const std::vector<double>& w_orig,
                       const std::vector<double>& p, double beta) {
    std::vector<double> costs;
    for (const Route& r : brute_force_routes(net)) {
        double c = 0.0;
        for (std::size_t k : r) c += net.arcs[k].latency.value(w_orig[k]) + p[k];
        costs.push_back(c);
    }
    double lo = costs[0];
    for (double c : costs) lo = std::min(lo, c);
    double sum = 0.0;
    for (double c : costs) sum += std::exp(-beta * (c - lo));
    return lo - std::log(sum) / beta;
}

std::vector<double> route_product_flows(const CoDag& codag, const std::vector<double>& xi) {
    std::vector<double> w(codag.num_arcs(), 0.0);
    std::function<void(std::size_t, double)> walk = [&](std::size_t node, double mass) {
        for (std::size_t a : codag.outgoing(node)) {
            const double m = mass * xi[a];
            w[a] += m;
            walk(codag.arc(a).head, m);
        }
    };
    walk(codag.origin(), codag.demand());
    return w;
}

std::vector<std::size_t> longest_downstream(const CoDag& codag) {
    const std::size_t n = codag.num_nodes();
    std::vector<std::size_t> indeg(n, 0);
    for (const CoDagArc& a : codag.arcs()) ++indeg[a.head];
    std::queue<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (indeg[i] == 0) ready.push(i);
    }
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        const std::size_t i = ready.front();
        ready.pop();
        order.push_back(i);
        for (const CoDagArc& a : codag.arcs()) {
            if (a.tail == i && --indeg[a.head] == 0) ready.push(a.head);
        }
    }
    // Longest arc count from each node to the destination.
    std::vector<std::size_t> to_dest(n, 0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        for (const CoDagArc& a : codag.arcs()) {
            if (a.tail == *it) to_dest[*it] = std::max(to_dest[*it], to_dest[a.head] + 1);
        }
    }
    std::vector<std::size_t> h(codag.num_arcs());
    for (std::size_t a = 0; a < h.size(); ++a) h[a] = 1 + to_dest[codag.arc(a).head];
    return h;
}

}  // namespace tolldag::testing
