#include "tolldag/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tolldag/errors.hpp"
#include "json_util.hpp"

namespace tolldag {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

double parse_double(std::string_view s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    double x = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || end != s.data() + s.size())
        throw ParseError(std::string(s), "not a number");
    return x;
}

void write_trace_csv(std::ostream& out, const CoDag& codag, const SimTrace& trace) {
    out << kTraceHeader << '\n';
    std::string line;
    for (const SimRecord& r : trace.records) {
        const std::string diag = format_double(r.dist_xi) + ',' + format_double(r.dist_p) + ',' +
                                 format_double(r.F) + ',' + format_double(r.V);
        for (std::size_t a = 0; a < codag.num_arcs(); ++a) {
            const std::size_t k = codag.arc(a).original;
            line.clear();
            line += std::to_string(r.step);
            line += ',';
            line += codag.arc_id(a);
            for (double v : {r.xi[a], r.W[a], r.W_orig[k], r.P[k]}) {
                line += ',';
                line += format_double(v);
            }
            line += ',';
            line += diag;
            out << line << '\n';
        }
    }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("header", "empty trace");
    if (line != kTraceHeader) throw ParseError("header", "unexpected columns '" + line + "'");
    std::vector<TraceRow> rows;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string_view> cells;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            cells.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (cells.size() != 10)
            throw ParseError("line " + std::to_string(lineno), "expected 10 columns");
        TraceRow r;
        try {
            r.step = static_cast<long>(parse_double(cells[0]));
            r.arc_id = std::string(cells[1]);
            double* fields[] = {&r.xi, &r.W, &r.W_orig, &r.P, &r.dist_xi, &r.dist_p, &r.F, &r.V};
            for (std::size_t c = 0; c < 8; ++c) *fields[c] = parse_double(cells[c + 2]);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno), e.what());
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string trace_config_json(const CoDag& codag, const SimTrace& trace) {
    nlohmann::json doc;
    doc["sim_config"] = detail::sim_config_to_json(trace.config);
    doc["codag_arcs"] = detail::codag_arcs_to_json(codag);
    doc["bounds"] = {{"demand", trace.bounds.demand},
                     {"toll_cap", trace.bounds.toll_cap},
                     {"cost_cap", trace.bounds.cost_cap}};
    doc["bound_checks"] = trace.bound_checks;
    if (trace.reference) {
        doc["reference"] = {{"xi_bar", detail::json_array(trace.reference->xi_bar)},
                            {"p_bar", detail::json_array(trace.reference->p_bar)}};
    } else {
        doc["reference"] = nullptr;
    }
    return doc.dump(2) + "\n";
}

}  // namespace tolldag
