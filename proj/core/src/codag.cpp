#include "tolldag/codag.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <tuple>
#include <utility>

#include "tolldag/errors.hpp"

namespace tolldag {

std::string CoDag::node_label(std::size_t i) const {
    return network_.nodes[nodes_[i].original] + "#" + std::to_string(nodes_[i].suffix_class);
}

CoDag build_codag(const OriginalNetwork& net, std::size_t route_cap) {
    validate(net);
    const std::vector<Route> routes = enumerate_acyclic_routes(net, route_cap);
    if (routes.empty()) throw NoRoute("no acyclic origin-destination route");

    // Prefix tree of all routes. Children are always created after their parent.
    struct TrieNode {
        std::size_t original;
        std::map<std::size_t, std::size_t> children;  // original arc -> trie node
    };
    std::vector<TrieNode> trie{{net.origin, {}}};
    for (const Route& route : routes) {
        std::size_t at = 0;
        for (std::size_t a : route) {
            auto it = trie[at].children.find(a);
            if (it == trie[at].children.end()) {
                trie.push_back({net.arcs[a].head, {}});
                it = trie[at].children.emplace(a, trie.size() - 1).first;
            }
            at = it->second;
        }
    }

    // Suffix minimisation: two trie nodes are merged iff their (arc, child class)
    // signatures match, which is equivalent to identical suffix route sets.
    using Signature = std::vector<std::pair<std::size_t, std::size_t>>;
    std::map<Signature, std::size_t> class_of_signature;
    std::vector<std::size_t> trie_class(trie.size());
    std::vector<std::size_t> class_original;
    for (std::size_t t = trie.size(); t-- > 0;) {
        Signature sig;
        sig.reserve(trie[t].children.size());
        for (const auto& [a, child] : trie[t].children) sig.emplace_back(a, trie_class[child]);
        auto [it, inserted] = class_of_signature.emplace(std::move(sig), class_original.size());
        if (inserted) class_original.push_back(trie[t].original);
        trie_class[t] = it->second;
    }
    const std::size_t num_classes = class_original.size();

    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> class_arcs;  // (tail, arc, head)
    for (std::size_t t = 0; t < trie.size(); ++t) {
        for (const auto& [a, child] : trie[t].children) {
            class_arcs.emplace(trie_class[t], a, trie_class[child]);
        }
    }

    // Topological numbering (Kahn, smallest class first for determinism).
    std::vector<std::vector<std::size_t>> succ(num_classes);
    std::vector<std::size_t> indegree(num_classes, 0);
    for (const auto& [tail, a, head] : class_arcs) {
        succ[tail].push_back(head);
        ++indegree[head];
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    ready.push(trie_class[0]);
    std::vector<std::size_t> topo_index(num_classes, 0);
    std::size_t next = 0;
    while (!ready.empty()) {
        const std::size_t c = ready.top();
        ready.pop();
        topo_index[c] = next++;
        for (std::size_t h : succ[c]) {
            if (--indegree[h] == 0) ready.push(h);
        }
    }

    CoDag g;
    g.network_ = net;
    g.nodes_.resize(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) {
        g.nodes_[topo_index[c]] = CoDagNode{class_original[c], c};
    }
    for (const auto& [tail, a, head] : class_arcs) {
        g.arcs_.push_back(CoDagArc{topo_index[tail], topo_index[head], a});
    }
    std::sort(g.arcs_.begin(), g.arcs_.end(), [](const CoDagArc& x, const CoDagArc& y) {
        return std::tie(x.tail, x.original, x.head) < std::tie(y.tail, y.original, y.head);
    });

    g.outgoing_.assign(num_classes, {});
    g.incoming_.assign(num_classes, {});
    g.copies_.assign(net.num_arcs(), {});
    for (std::size_t a = 0; a < g.arcs_.size(); ++a) {
        g.outgoing_[g.arcs_[a].tail].push_back(a);
        g.incoming_[g.arcs_[a].head].push_back(a);
        g.copies_[g.arcs_[a].original].push_back(a);
    }

    g.heights_.assign(g.arcs_.size(), 1);
    for (std::size_t a = g.arcs_.size(); a-- > 0;) {
        std::size_t below = 0;
        for (std::size_t b : g.outgoing_[g.arcs_[a].head]) below = std::max(below, g.heights_[b]);
        g.heights_[a] = 1 + below;
    }
    g.max_height_ = *std::max_element(g.heights_.begin(), g.heights_.end());
    for (std::size_t a : g.outgoing_[g.origin()]) {
        g.max_route_length_ = std::max(g.max_route_length_, g.heights_[a]);
    }
    return g;
}

std::vector<Route> codag_routes(const CoDag& codag) {
    std::vector<Route> routes;
    Route path;
    std::function<void(std::size_t)> walk = [&](std::size_t node) {
        if (node == codag.destination()) {
            routes.push_back(path);
            return;
        }
        for (std::size_t a : codag.outgoing(node)) {
            path.push_back(codag.arc(a).original);
            walk(codag.arc(a).head);
            path.pop_back();
        }
    };
    walk(codag.origin());
    return routes;
}

ArcVector aggregate_flow(const CoDag& codag, std::span<const double> w) {
    if (w.size() != codag.num_arcs()) {
        throw DimensionMismatch("aggregate_flow", codag.num_arcs(), w.size());
    }
    ArcVector out(codag.num_original_arcs(), 0.0);
    for (std::size_t a = 0; a < w.size(); ++a) {
        if (w[a] < 0.0) throw NegativeFlow("aggregate_flow: negative flow on " + codag.arc_id(a));
        out[codag.arc(a).original] += w[a];
    }
    return out;
}

ArcVector node_outflow(const CoDag& codag, std::span<const double> w) {
    ArcVector out(codag.num_nodes(), 0.0);
    for (std::size_t a = 0; a < codag.num_arcs(); ++a) out[codag.arc(a).tail] += w[a];
    return out;
}

}  // namespace tolldag
