#include <gtest/gtest.h>

#include <set>

#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "tolldag/errors.hpp"
#include "tolldag/network.hpp"
#include "tolldag/network_io.hpp"

namespace tolldag {
namespace {

using testing::brute_force_routes;

OriginalNetwork line(std::size_t extra_nodes) {
    OriginalNetwork net;
    net.nodes = {"o", "d"};
    for (std::size_t i = 0; i < extra_nodes; ++i) net.nodes.push_back("x" + std::to_string(i));
    net.origin = 0;
    net.destination = 1;
    net.arcs.push_back({"a1", 0, 1, LatencyFn::affine(1.0, 0.0)});
    return net;
}

TEST(Network, SingleArcHasOneRoute) {
    const auto routes = enumerate_acyclic_routes(builtin_network("single_arc"));
    ASSERT_EQ(routes.size(), 1u);
    EXPECT_EQ(routes[0], Route{0});
}

TEST(Network, DiamondHasFourRoutesMatchingDfs) {
    const OriginalNetwork net = builtin_network("diamond");
    const auto routes = enumerate_acyclic_routes(net);
    EXPECT_EQ(routes.size(), 4u);
    EXPECT_EQ(std::set<Route>(routes.begin(), routes.end()), brute_force_routes(net));
}

TEST(Network, DisconnectedNodeIsIrrelevant) {
    EXPECT_EQ(enumerate_acyclic_routes(line(0)), enumerate_acyclic_routes(line(1)));
}

TEST(Network, EnumerationMatchesDfsOnRandomNetworks) {
    testing::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const OriginalNetwork net = testing::random_network(rng);
        const auto routes = enumerate_acyclic_routes(net);
        const std::set<Route> unique(routes.begin(), routes.end());
        EXPECT_EQ(unique.size(), routes.size());
        EXPECT_EQ(unique, brute_force_routes(net));
    }
}

TEST(Network, RouteCapIsEnforced) {
    EXPECT_THROW(enumerate_acyclic_routes(builtin_network("diamond"), 3), RouteExplosion);
    EXPECT_NO_THROW(enumerate_acyclic_routes(builtin_network("diamond"), 4));
}

TEST(Network, ValidationErrors) {
    OriginalNetwork net = line(0);
    net.demand = 0.0;
    EXPECT_THROW(validate(net), ValidationError);

    net = line(0);
    net.arcs.push_back({"loop", 0, 0, LatencyFn::affine(1.0, 0.0)});
    EXPECT_THROW(validate(net), ValidationError);

    net = line(0);
    net.arcs.push_back({"a1", 0, 1, LatencyFn::affine(1.0, 0.0)});
    EXPECT_THROW(validate(net), ValidationError);

    net = line(0);
    net.destination = 0;
    EXPECT_THROW(validate(net), ValidationError);

    net = line(0);
    net.arcs[0].latency = LatencyFn::affine(-1.0, 0.0);
    EXPECT_THROW(validate(net), ValidationError);
}

TEST(Network, MissingRouteIsReported) {
    OriginalNetwork net = line(1);
    net.arcs[0].head = 2;
    EXPECT_THROW(validate(net), NoRoute);
}

TEST(Network, NodeIndexLookup) {
    const OriginalNetwork net = builtin_network("diamond");
    EXPECT_EQ(net.node_index("2"), 2u);
    EXPECT_THROW(net.node_index("nope"), ValidationError);
}

}  // namespace
}  // namespace tolldag
