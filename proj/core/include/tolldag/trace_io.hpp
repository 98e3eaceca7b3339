#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tolldag/codag.hpp"
#include "tolldag/dynamics.hpp"

namespace tolldag {

inline constexpr std::string_view kTraceHeader = "step,arc_id,xi,W,W_orig,P,dist_xi,dist_p,F,V";

/// Shortest decimal that parses back to the same double; "nan", "inf", "-inf"
/// for non-finite values.
std::string format_double(double x);
/// Inverse of format_double. Throws ParseError.
double parse_double(std::string_view s);

/// One row per (step, CoDAG arc). W_orig and P refer to the arc's original
/// arc; the per-step diagnostics repeat on every row of that step.
void write_trace_csv(std::ostream& out, const CoDag& codag, const SimTrace& trace);

struct TraceRow {
    long step = 0;
    std::string arc_id;
    double xi = 0.0;
    double W = 0.0;
    double W_orig = 0.0;
    double P = 0.0;
    double dist_xi = 0.0;
    double dist_p = 0.0;
    double F = 0.0;
    double V = 0.0;
};

/// Reads a trace written by write_trace_csv. Throws ParseError naming the
/// offending column or line.
std::vector<TraceRow> read_trace_csv(std::istream& in);

/// JSON sidecar: simulation parameters, CoDAG arc table (id, tail, head,
/// original arc id), trajectory bounds and the reference point if any.
std::string trace_config_json(const CoDag& codag, const SimTrace& trace);

}  // namespace tolldag
