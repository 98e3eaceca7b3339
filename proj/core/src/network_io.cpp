#include "tolldag/network_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tolldag/errors.hpp"

namespace tolldag {

using nlohmann::json;

namespace {

const json& require(const json& obj, const std::string& key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path.empty() ? key : path + "." + key, "missing field");
    return *it;
}

std::string node_name(const json& v, const std::string& path) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw ParseError(path, "node ids must be strings or integers");
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ParseError(path, "expected a number");
    return v.get<double>();
}

LatencyFn parse_latency(const json& arc, const std::string& path) {
    const auto kind = arc.find("latency");
    if (kind == arc.end() || (kind->is_string() && kind->get<std::string>() == "affine")) {
        return LatencyFn::affine(number(require(arc, "theta1", path), path + ".theta1"),
                                 number(require(arc, "theta0", path), path + ".theta0"));
    }
    if (!kind->is_string()) throw ParseError(path + ".latency", "expected a string");
    if (kind->get<std::string>() != "bpr")
        throw ParseError(path + ".latency", "unknown latency kind '" + kind->get<std::string>() + "'");
    const std::string ppath = path + ".params";
    const json& params = require(arc, "params", path);
    if (!params.is_object()) throw ParseError(ppath, "expected an object");
    const double t0 = number(require(params, "free_flow_time", ppath), ppath + ".free_flow_time");
    const double cap = number(require(params, "capacity", ppath), ppath + ".capacity");
    const double alpha = params.contains("alpha") ? number(params["alpha"], ppath + ".alpha") : 0.15;
    const double power = params.contains("power") ? number(params["power"], ppath + ".power") : 4.0;
    return LatencyFn::bpr(t0, cap, alpha, power);
}

OriginalArc make_arc(const OriginalNetwork& net, std::string id, const std::string& tail,
                     const std::string& head, LatencyFn fn) {
    return OriginalArc{std::move(id), net.node_index(tail), net.node_index(head), std::move(fn)};
}

OriginalNetwork from_table(std::vector<std::string> nodes,
                           const std::vector<std::tuple<std::string, std::string, double, double>>& arcs,
                           double demand) {
    OriginalNetwork net;
    net.nodes = std::move(nodes);
    net.origin = net.node_index("o");
    net.destination = net.node_index("d");
    net.demand = demand;
    for (std::size_t k = 0; k < arcs.size(); ++k) {
        const auto& [tail, head, theta1, theta0] = arcs[k];
        net.arcs.push_back(make_arc(net, "a" + std::to_string(k + 1), tail, head,
                                    LatencyFn::affine(theta1, theta0)));
    }
    validate(net);
    return net;
}

}  // namespace

OriginalNetwork parse_network(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("<document>", e.what());
    }
    if (!doc.is_object()) throw ParseError("<document>", "expected a JSON object");

    OriginalNetwork net;
    const json& nodes = require(doc, "nodes", "");
    if (!nodes.is_array()) throw ParseError("nodes", "expected an array");
    for (std::size_t k = 0; k < nodes.size(); ++k)
        net.nodes.push_back(node_name(nodes[k], "nodes[" + std::to_string(k) + "]"));

    auto lookup = [&](const json& v, const std::string& path) {
        const std::string name = node_name(v, path);
        try {
            return net.node_index(name);
        } catch (const ValidationError&) {
            throw ParseError(path, "unknown node '" + name + "'");
        }
    };

    const json& arcs = require(doc, "arcs", "");
    if (!arcs.is_array()) throw ParseError("arcs", "expected an array");
    for (std::size_t k = 0; k < arcs.size(); ++k) {
        const std::string path = "arcs[" + std::to_string(k) + "]";
        const json& arc = arcs[k];
        if (!arc.is_object()) throw ParseError(path, "expected an object");
        const json& id = require(arc, "id", path);
        OriginalArc out;
        out.id = id.is_string() ? id.get<std::string>() : node_name(id, path + ".id");
        out.tail = lookup(require(arc, "tail", path), path + ".tail");
        out.head = lookup(require(arc, "head", path), path + ".head");
        out.latency = parse_latency(arc, path);
        net.arcs.push_back(std::move(out));
    }
    net.origin = lookup(require(doc, "origin", ""), "origin");
    net.destination = lookup(require(doc, "destination", ""), "destination");
    net.demand = number(require(doc, "demand", ""), "demand");
    validate(net);
    return net;
}

std::string network_to_json(const OriginalNetwork& net) {
    json doc;
    doc["nodes"] = net.nodes;
    json arcs = json::array();
    for (const OriginalArc& a : net.arcs) {
        json arc{{"id", a.id}, {"tail", net.nodes[a.tail]}, {"head", net.nodes[a.head]}};
        if (const AffineLatency* f = a.latency.as_affine()) {
            arc["theta1"] = f->theta1;
            arc["theta0"] = f->theta0;
        } else if (const BprLatency* f = a.latency.as_bpr()) {
            arc["latency"] = "bpr";
            arc["params"] = {{"free_flow_time", f->free_flow_time},
                             {"capacity", f->capacity},
                             {"alpha", f->alpha},
                             {"power", f->power}};
        } else {
            throw ValidationError("arc '" + a.id + "' has a custom latency with no file form");
        }
        arcs.push_back(std::move(arc));
    }
    doc["arcs"] = std::move(arcs);
    doc["origin"] = net.nodes[net.origin];
    doc["destination"] = net.nodes[net.destination];
    doc["demand"] = net.demand;
    return doc.dump(2) + "\n";
}

OriginalNetwork load_network_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open network file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_network(buf.str());
}

void save_network_file(const OriginalNetwork& net, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << network_to_json(net);
}

std::vector<std::string> builtin_network_names() {
    return {"single_arc", "parallel2", "diamond", "nine_arc"};
}

bool is_builtin_network(std::string_view name) {
    for (const std::string& n : builtin_network_names()) {
        if (n == name) return true;
    }
    return false;
}

OriginalNetwork builtin_network(std::string_view name) {
    if (name == "single_arc") return from_table({"o", "d"}, {{"o", "d", 2.0, 1.0}}, 1.0);
    if (name == "parallel2")
        return from_table({"o", "d"}, {{"o", "d", 1.0, 0.0}, {"o", "d", 1.0, 0.0}}, 1.0);
    if (name == "diamond") {
        return from_table({"o", "1", "2", "d"},
                          {{"o", "1", 1.0, 0.5},
                           {"o", "2", 2.0, 0.2},
                           {"1", "2", 1.0, 0.1},
                           {"2", "1", 1.5, 0.1},
                           {"1", "d", 2.0, 0.3},
                           {"2", "d", 1.0, 0.4}},
                          1.0);
    }
    if (name == "nine_arc") {
        // Six nodes with one bidirectional pair (1 <-> 2); arcs 5, 6 and 7
        // each carry two CoDAG copies.
        return from_table({"o", "1", "2", "3", "4", "d"},
                          {{"o", "1", 2.0, 0.0},
                           {"o", "2", 1.0, 1.0},
                           {"1", "2", 1.0, 0.0},
                           {"2", "1", 1.0, 1.0},
                           {"1", "3", 1.0, 1.0},
                           {"3", "4", 1.0, 0.0},
                           {"2", "d", 2.0, 1.0},
                           {"3", "2", 2.0, 1.0},
                           {"4", "d", 2.0, 1.0}},
                          1.0);
    }
    throw ValidationError("unknown builtin network '" + std::string(name) + "'");
}

OriginalNetwork load_network(const std::string& name_or_path) {
    if (is_builtin_network(name_or_path)) return builtin_network(name_or_path);
    return load_network_file(name_or_path);
}

}  // namespace tolldag
