#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tolldag/network.hpp"

namespace tolldag {

/// Parses and validates a network document:
///   {"nodes": [...], "arcs": [{"id", "tail", "head", "theta1", "theta0"}, ...],
///    "origin", "destination", "demand"}
/// An arc may instead carry {"latency": "bpr", "params": {"free_flow_time",
/// "capacity", "alpha", "power"}}. Throws ParseError naming the offending
/// field, ValidationError, NoRoute.
OriginalNetwork parse_network(std::string_view text);

/// Serialises to the same schema. Throws ValidationError for custom latencies.
std::string network_to_json(const OriginalNetwork& net);

OriginalNetwork load_network_file(const std::filesystem::path& path);
void save_network_file(const OriginalNetwork& net, const std::filesystem::path& path);

/// "single_arc", "parallel2", "diamond", "nine_arc".
std::vector<std::string> builtin_network_names();
bool is_builtin_network(std::string_view name);
/// Throws ValidationError for unknown names.
OriginalNetwork builtin_network(std::string_view name);

/// A builtin name, otherwise a path to a network file.
OriginalNetwork load_network(const std::string& name_or_path);

}  // namespace tolldag
