#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tolldag/codag.hpp"
#include "tolldag/dynamics.hpp"

namespace tolldag {

enum class Command { equilibrium, social_opt, optimal_toll, simulate, ode_flow, ode_toll, verify };

std::optional<Command> parse_command(std::string_view name);
std::string_view command_name(Command command);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNonConvergence = 3;
inline constexpr int kExitPropertyFailure = 4;

struct ExperimentSetup {
    std::string network = "nine_arc";  ///< builtin name or path to a network file
    Command command = Command::equilibrium;
    SimConfig params;
    /// "1" (every node), "k0,k1,..." (per CoDAG node) or "graded:<ratio>".
    std::string gains = "1";
    std::filesystem::path output_dir = ".";
    double t_end = 0.0;  ///< ODE horizon; 0 picks the command default
    double dt = 0.0;     ///< ODE step; 0 picks the command default
    long trials = 100;   ///< monotonicity pairs in verify
    long starts = 10;    ///< optimal-toll initialisations in verify
};

/// Per-node gains from the textual form in ExperimentSetup::gains. Throws
/// InvalidOptions, DimensionMismatch.
std::vector<double> resolve_gains(const CoDag& codag, std::string_view text);

struct PropertyVerdict {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunOutcome {
    int exit_code = kExitOk;
    std::string message;
    std::vector<PropertyVerdict> verdicts;  ///< verify only
};

/// Runs one command and writes config.json and result.json (plus trace.csv for
/// simulate) under setup.output_dir. Library errors are mapped to exit codes:
/// configuration and input errors to 2, solver nonconvergence to 3, property
/// and monitor failures to 4.
RunOutcome run(const ExperimentSetup& setup, std::ostream& log);

/// The property suite behind `verify`, without file output.
std::vector<PropertyVerdict> verify_properties(const CoDag& codag, const ExperimentSetup& setup);

}  // namespace tolldag
