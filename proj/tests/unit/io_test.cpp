#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "support/generators.hpp"
#include "tolldag/codag.hpp"
#include "tolldag/dynamics.hpp"
#include "tolldag/errors.hpp"
#include "tolldag/network_io.hpp"
#include "tolldag/trace_io.hpp"

namespace tolldag {
namespace {

constexpr const char* kValid = R"({
  "nodes": ["o", "m", "d"],
  "arcs": [
    {"id": "x", "tail": "o", "head": "m", "theta1": 1.5, "theta0": 0.25},
    {"id": "y", "tail": "m", "head": "d", "theta1": 2, "theta0": 0},
    {"id": "z", "tail": "o", "head": "d", "latency": "bpr",
     "params": {"free_flow_time": 1, "capacity": 0.5, "alpha": 0.15, "power": 4}}
  ],
  "origin": "o",
  "destination": "d",
  "demand": 1.25
})";

TEST(NetworkIo, ParsesSchema) {
    const OriginalNetwork net = parse_network(kValid);
    EXPECT_EQ(net.num_nodes(), 3u);
    ASSERT_EQ(net.num_arcs(), 3u);
    EXPECT_EQ(net.arcs[0].latency, LatencyFn::affine(1.5, 0.25));
    EXPECT_EQ(net.arcs[2].latency, LatencyFn::bpr(1.0, 0.5, 0.15, 4.0));
    EXPECT_EQ(net.destination, 2u);
    EXPECT_DOUBLE_EQ(net.demand, 1.25);
}

TEST(NetworkIo, MissingDemandNamesField) {
    auto doc = nlohmann::json::parse(kValid);
    doc.erase("demand");
    try {
        parse_network(doc.dump());
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.field(), "demand");
        EXPECT_NE(std::string(e.what()).find("demand"), std::string::npos);
    }
}

TEST(NetworkIo, BadArcFieldNamesPath) {
    auto doc = nlohmann::json::parse(kValid);
    doc["arcs"][1]["theta1"] = "fast";
    try {
        parse_network(doc.dump());
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.field(), "arcs[1].theta1");
    }
    EXPECT_THROW(parse_network("{not json"), ParseError);
}

TEST(NetworkIo, InvalidNetworkIsValidationError) {
    auto doc = nlohmann::json::parse(kValid);
    doc["arcs"][0]["theta1"] = -1.0;
    EXPECT_THROW(parse_network(doc.dump()), ValidationError);
    doc = nlohmann::json::parse(kValid);
    doc["arcs"][0]["head"] = "nowhere";
    EXPECT_THROW(parse_network(doc.dump()), Error);
}

TEST(NetworkIo, BuiltinSingleArc) {
    const OriginalNetwork net = builtin_network("single_arc");
    EXPECT_EQ(net.num_nodes(), 2u);
    EXPECT_EQ(net.num_arcs(), 1u);
}

TEST(NetworkIo, BuiltinNineArcParameters) {
    const OriginalNetwork net = builtin_network("nine_arc");
    ASSERT_EQ(net.num_arcs(), 9u);
    const double theta1[] = {2, 1, 1, 1, 1, 1, 2, 2, 2};
    const double theta0[] = {0, 1, 0, 1, 1, 0, 1, 1, 1};
    for (std::size_t k = 0; k < 9; ++k) {
        EXPECT_EQ(net.arcs[k].id, "a" + std::to_string(k + 1));
        EXPECT_EQ(net.arcs[k].latency, LatencyFn::affine(theta1[k], theta0[k])) << k;
    }
}

TEST(NetworkIo, BuiltinsRoundTrip) {
    for (const std::string& name : builtin_network_names()) {
        const OriginalNetwork net = builtin_network(name);
        EXPECT_EQ(parse_network(network_to_json(net)), net) << name;
    }
    EXPECT_THROW(builtin_network("nope"), ValidationError);
}

TEST(NetworkIo, RandomNetworksRoundTripThroughFiles) {
    testing::Rng rng(13);
    const auto dir = std::filesystem::temp_directory_path() / "tolldag_io_test";
    std::filesystem::create_directories(dir);
    for (int trial = 0; trial < 20; ++trial) {
        const OriginalNetwork net = testing::random_network(rng);
        const auto path = dir / ("net" + std::to_string(trial) + ".json");
        save_network_file(net, path);
        EXPECT_EQ(load_network_file(path), net);
        EXPECT_EQ(load_network(path.string()), net);
    }
    std::filesystem::remove_all(dir);
    EXPECT_THROW(load_network_file(dir / "missing.json"), Error);
}

TEST(TraceIo, FormatRoundTripsExactly) {
    testing::Rng rng(1);
    std::uniform_int_distribution<std::uint64_t> bits;
    for (int trial = 0; trial < 10'000; ++trial) {
        double x;
        const std::uint64_t b = bits(rng);
        std::memcpy(&x, &b, sizeof x);
        if (!std::isfinite(x)) continue;
        EXPECT_EQ(parse_double(format_double(x)), x) << format_double(x);
    }
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(2.0), "2");
    EXPECT_TRUE(std::isnan(parse_double(format_double(std::nan("")))));
    EXPECT_EQ(parse_double(format_double(std::numeric_limits<double>::infinity())),
              std::numeric_limits<double>::infinity());
    EXPECT_THROW(parse_double("1.5x"), ParseError);
}

TEST(TraceIo, CsvLayoutAndRoundTrip) {
    const CoDag codag = build_codag(builtin_network("nine_arc"));
    SimConfig cfg;
    cfg.horizon = 25;
    const SimTrace trace = simulate(codag, cfg, solve_reference(codag, 10.0));
    std::ostringstream out;
    write_trace_csv(out, codag, trace);
    const std::string text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), kTraceHeader);
    EXPECT_EQ(std::string(kTraceHeader), "step,arc_id,xi,W,W_orig,P,dist_xi,dist_p,F,V");

    std::istringstream in(text);
    const std::vector<TraceRow> rows = read_trace_csv(in);
    ASSERT_EQ(rows.size(), trace.records.size() * codag.num_arcs());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t n = r / codag.num_arcs();
        const std::size_t a = r % codag.num_arcs();
        const SimRecord& rec = trace.records[n];
        const std::size_t k = codag.arc(a).original;
        EXPECT_EQ(rows[r].step, static_cast<long>(n));
        EXPECT_EQ(rows[r].arc_id, codag.arc_id(a));
        EXPECT_EQ(rows[r].xi, rec.xi[a]);
        EXPECT_EQ(rows[r].W, rec.W[a]);
        EXPECT_EQ(rows[r].W_orig, rec.W_orig[k]);
        EXPECT_EQ(rows[r].P, rec.P[k]);
        EXPECT_EQ(rows[r].dist_xi, rec.dist_xi);
        EXPECT_EQ(rows[r].dist_p, rec.dist_p);
        EXPECT_EQ(rows[r].F, rec.F);
        EXPECT_EQ(rows[r].V, rec.V);
    }
}

TEST(TraceIo, RejectsWrongHeader) {
    std::istringstream in("step,arc,xi\n0,c0,1\n");
    EXPECT_THROW(read_trace_csv(in), ParseError);
}

TEST(TraceIo, SidecarRecordsConfigAndReference) {
    const CoDag codag = build_codag(builtin_network("diamond"));
    SimConfig cfg;
    cfg.horizon = 3;
    cfg.seed = 99;
    const SimReference ref = solve_reference(codag, 10.0);
    const auto doc = nlohmann::json::parse(trace_config_json(codag, simulate(codag, cfg, ref)));
    EXPECT_EQ(doc["sim_config"]["seed"], 99);
    EXPECT_EQ(doc["sim_config"]["horizon"], 3);
    EXPECT_EQ(doc["codag_arcs"].size(), codag.num_arcs());
    ASSERT_TRUE(doc["reference"].is_object());
    EXPECT_EQ(doc["reference"]["p_bar"].get<std::vector<double>>(), ref.p_bar);
    EXPECT_EQ(doc["reference"]["xi_bar"].get<std::vector<double>>(), ref.xi_bar);
}

}  // namespace
}  // namespace tolldag
