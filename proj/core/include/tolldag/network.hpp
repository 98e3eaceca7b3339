#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tolldag/latency.hpp"

namespace tolldag {

/// Arc of the original (possibly cyclic) network. `tail`/`head` index into
/// OriginalNetwork::nodes.
struct OriginalArc {
    std::string id;
    std::size_t tail = 0;
    std::size_t head = 0;
    LatencyFn latency;

    bool operator==(const OriginalArc&) const = default;
};

/// Single-origin, single-destination traffic network. Arcs may come in
/// bidirectional pairs.
struct OriginalNetwork {
    std::vector<std::string> nodes;
    std::vector<OriginalArc> arcs;
    std::size_t origin = 0;
    std::size_t destination = 0;
    double demand = 1.0;

    std::size_t num_nodes() const noexcept { return nodes.size(); }
    std::size_t num_arcs() const noexcept { return arcs.size(); }

    /// Index of the node with the given id. Throws ValidationError if absent.
    std::size_t node_index(const std::string& id) const;

    bool operator==(const OriginalNetwork&) const = default;
};

/// Throws ValidationError naming the first violated invariant; NoRoute if the
/// destination is unreachable from the origin.
void validate(const OriginalNetwork& net);

/// A route as the sequence of original arc indices it traverses.
using Route = std::vector<std::size_t>;

inline constexpr std::size_t kDefaultRouteCap = 1'000'000;

/// All simple origin-to-destination routes, in depth-first order with arcs
/// explored by increasing index. Throws RouteExplosion past `cap` routes.
std::vector<Route> enumerate_acyclic_routes(const OriginalNetwork& net,
                                            std::size_t cap = kDefaultRouteCap);

}  // namespace tolldag
