#include "support/generators.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "tolldag/flow.hpp"

namespace tolldag::testing {

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

OriginalNetwork random_network(Rng& rng, std::size_t max_nodes, std::size_t max_arcs) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, max_nodes)(rng);
    OriginalNetwork net;
    for (std::size_t i = 0; i < n; ++i) net.nodes.push_back("n" + std::to_string(i));
    net.origin = 0;
    net.destination = n - 1;
    net.demand = uniform(rng, 0.5, 2.0);

    std::set<std::pair<std::size_t, std::size_t>> used;
    auto add = [&](std::size_t t, std::size_t h) {
        if (t == h || net.arcs.size() >= max_arcs || !used.insert({t, h}).second) return false;
        const double theta1 = uniform(rng, 0.2, 3.0);
        const double theta0 = uniform(rng, 0.0, 1.5);
        net.arcs.push_back({"a" + std::to_string(net.arcs.size() + 1), t, h,
                            LatencyFn::affine(theta1, theta0)});
        return true;
    };

    // Backbone path o -> ... -> d through a random subset of intermediates.
    std::vector<std::size_t> mid(n - 2);
    std::iota(mid.begin(), mid.end(), 1);
    std::shuffle(mid.begin(), mid.end(), rng);
    mid.resize(std::uniform_int_distribution<std::size_t>(0, mid.size())(rng));
    std::size_t prev = net.origin;
    for (std::size_t m : mid) {
        add(prev, m);
        prev = m;
    }
    add(prev, net.destination);

    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const std::size_t target = std::uniform_int_distribution<std::size_t>(
        net.arcs.size(), std::max(net.arcs.size(), max_arcs))(rng);
    for (int guard = 0; net.arcs.size() < target && guard < 200; ++guard) {
        const std::size_t t = pick(rng);
        const std::size_t h = pick(rng);
        if (t == net.destination || h == net.origin) continue;
        if (add(t, h) && std::bernoulli_distribution(1.0 / 3.0)(rng) && t != net.origin &&
            h != net.destination) {
            add(h, t);
        }
    }
    return net;
}

std::vector<double> random_choice(const CoDag& codag, Rng& rng) {
    std::vector<double> xi(codag.num_arcs(), 0.0);
    for (std::size_t i = 0; i < codag.num_nodes(); ++i) {
        const auto out = codag.outgoing(i);
        double sum = 0.0;
        for (std::size_t a : out) sum += xi[a] = uniform(rng, 0.05, 1.0);
        for (std::size_t a : out) xi[a] /= sum;
    }
    return xi;
}

std::vector<double> random_feasible_flow(const CoDag& codag, Rng& rng) {
    return propagate_flows(codag, random_choice(codag, rng), codag.demand());
}

std::vector<double> random_tolls(const CoDag& codag, Rng& rng, double cap) {
    std::vector<double> p(codag.num_original_arcs());
    for (double& x : p) x = uniform(rng, 0.0, cap);
    return p;
}

}  // namespace tolldag::testing
