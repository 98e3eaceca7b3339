#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tolldag/network.hpp"

namespace tolldag {

/// Per-arc vectors (flows, tolls, probabilities, costs) are plain dense
/// vectors indexed by CoDAG arc or original arc, depending on context.
using ArcVector = std::vector<double>;

struct CoDagArc {
    std::size_t tail = 0;
    std::size_t head = 0;
    std::size_t original = 0;  ///< index of [a] in the original network
};

/// CoDAG node provenance. `suffix_class` identifies the set of remaining
/// routes; it is informational and not part of equality.
struct CoDagNode {
    std::size_t original = 0;
    std::size_t suffix_class = 0;
};

/// Condensed acyclic expansion of an OriginalNetwork that carries exactly the
/// network's acyclic origin-destination routes.
///
/// Nodes are numbered in topological order (origin first, destination last)
/// and arcs are sorted by tail, so a forward sweep over arc indices visits
/// every arc after all arcs entering its tail, and a reverse sweep visits
/// every arc after all arcs leaving its head.
class CoDag {
public:
    const OriginalNetwork& network() const noexcept { return network_; }

    std::size_t num_nodes() const noexcept { return nodes_.size(); }
    std::size_t num_arcs() const noexcept { return arcs_.size(); }
    std::size_t num_original_arcs() const noexcept { return network_.num_arcs(); }

    const CoDagNode& node(std::size_t i) const { return nodes_[i]; }
    const CoDagArc& arc(std::size_t a) const { return arcs_[a]; }
    std::span<const CoDagArc> arcs() const noexcept { return arcs_; }

    std::size_t origin() const noexcept { return 0; }
    std::size_t destination() const noexcept { return nodes_.size() - 1; }
    double demand() const noexcept { return network_.demand; }

    std::span<const std::size_t> outgoing(std::size_t node) const { return outgoing_[node]; }
    std::span<const std::size_t> incoming(std::size_t node) const { return incoming_[node]; }
    /// CoDAG copies of an original arc; empty if the arc lies on no acyclic route.
    std::span<const std::size_t> copies(std::size_t original) const { return copies_[original]; }

    const LatencyFn& latency(std::size_t a) const { return network_.arcs[arcs_[a].original].latency; }

    /// m_a: 1 for arcs into the destination, else 1 + max height downstream.
    std::size_t height(std::size_t a) const { return heights_[a]; }
    /// m(G), the maximum arc height.
    std::size_t max_height() const noexcept { return max_height_; }
    /// l(G), the maximum number of arcs on an origin-destination route.
    std::size_t max_route_length() const noexcept { return max_route_length_; }

    /// Stable textual id, "c<index>".
    std::string arc_id(std::size_t a) const { return "c" + std::to_string(a); }
    /// "<original node>#<suffix class>"
    std::string node_label(std::size_t i) const;

private:
    friend CoDag build_codag(const OriginalNetwork&, std::size_t);

    OriginalNetwork network_;
    std::vector<CoDagNode> nodes_;
    std::vector<CoDagArc> arcs_;
    std::vector<std::vector<std::size_t>> outgoing_;
    std::vector<std::vector<std::size_t>> incoming_;
    std::vector<std::vector<std::size_t>> copies_;
    std::vector<std::size_t> heights_;
    std::size_t max_height_ = 0;
    std::size_t max_route_length_ = 0;
};

/// Builds the CoDAG as the suffix-minimised prefix tree of all acyclic
/// routes: trie nodes with identical sets of remaining routes are merged.
/// Throws NoRoute or RouteExplosion.
CoDag build_codag(const OriginalNetwork& net, std::size_t route_cap = kDefaultRouteCap);

/// All origin-destination paths of the CoDAG, each mapped to its sequence of
/// original arc indices.
std::vector<Route> codag_routes(const CoDag& codag);

/// w_[a] = sum of w over the CoDAG copies of [a]. Throws DimensionMismatch,
/// NegativeFlow.
ArcVector aggregate_flow(const CoDag& codag, std::span<const double> w);

/// Sum of outgoing arc values at each node (zero at the destination).
ArcVector node_outflow(const CoDag& codag, std::span<const double> w);

}  // namespace tolldag
