#include "tolldag/network.hpp"

#include <cmath>
#include <unordered_set>

#include "tolldag/errors.hpp"

namespace tolldag {

std::size_t OriginalNetwork::node_index(const std::string& id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] == id) return i;
    }
    throw ValidationError("unknown node '" + id + "'");
}

void validate(const OriginalNetwork& net) {
    const std::size_t n = net.num_nodes();
    if (n < 2) throw ValidationError("network needs at least two nodes");

    std::unordered_set<std::string> seen;
    for (const auto& id : net.nodes) {
        if (!seen.insert(id).second) throw ValidationError("duplicate node id '" + id + "'");
    }
    if (net.origin >= n || net.destination >= n) {
        throw ValidationError("origin and destination must be network nodes");
    }
    if (net.origin == net.destination) {
        throw ValidationError("origin must differ from destination");
    }
    if (!(net.demand > 0.0) || !std::isfinite(net.demand)) {
        throw ValidationError("demand must be positive and finite");
    }

    seen.clear();
    for (const auto& arc : net.arcs) {
        if (!seen.insert(arc.id).second) throw ValidationError("duplicate arc id '" + arc.id + "'");
        if (arc.tail >= n || arc.head >= n) {
            throw ValidationError("arc '" + arc.id + "' references a missing node");
        }
        if (arc.tail == arc.head) throw ValidationError("arc '" + arc.id + "' is a self-loop");
        try {
            arc.latency.validate(net.demand);
        } catch (const ValidationError& e) {
            throw ValidationError("arc '" + arc.id + "': " + e.what());
        }
    }

    // Reachability of the destination.
    std::vector<char> reached(n, 0);
    std::vector<std::size_t> stack{net.origin};
    reached[net.origin] = 1;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (const auto& arc : net.arcs) {
            if (arc.tail == u && !reached[arc.head]) {
                reached[arc.head] = 1;
                stack.push_back(arc.head);
            }
        }
    }
    if (!reached[net.destination]) {
        throw NoRoute("destination '" + net.nodes[net.destination] +
                      "' is unreachable from origin '" + net.nodes[net.origin] + "'");
    }
}

std::vector<Route> enumerate_acyclic_routes(const OriginalNetwork& net, std::size_t cap) {
    const std::size_t n = net.num_nodes();
    std::vector<std::vector<std::size_t>> outgoing(n);
    for (std::size_t a = 0; a < net.num_arcs(); ++a) outgoing[net.arcs[a].tail].push_back(a);

    // Explicit-stack DFS; frame = (node, next outgoing position).
    struct Frame {
        std::size_t node;
        std::size_t next;
    };
    std::vector<Route> routes;
    std::vector<char> on_path(n, 0);
    std::vector<Frame> frames{{net.origin, 0}};
    Route path;
    on_path[net.origin] = 1;

    while (!frames.empty()) {
        Frame& top = frames.back();
        if (top.node == net.destination || top.next == outgoing[top.node].size()) {
            if (top.node == net.destination) {
                if (routes.size() == cap) throw RouteExplosion(cap);
                routes.push_back(path);
            }
            on_path[top.node] = 0;
            frames.pop_back();
            if (!path.empty()) path.pop_back();
            continue;
        }
        const std::size_t a = outgoing[top.node][top.next++];
        const std::size_t head = net.arcs[a].head;
        if (on_path[head]) continue;
        on_path[head] = 1;
        path.push_back(a);
        frames.push_back({head, 0});
    }
    return routes;
}

}  // namespace tolldag
