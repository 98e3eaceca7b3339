#include "tolldag/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "json_util.hpp"
#include "tolldag/equilibrium.hpp"
#include "tolldag/errors.hpp"
#include "tolldag/network_io.hpp"
#include "tolldag/parallel.hpp"
#include "tolldag/rng.hpp"
#include "tolldag/tolling.hpp"
#include "tolldag/trace_io.hpp"

namespace tolldag {

using nlohmann::json;
using detail::json_array;

namespace {

constexpr std::pair<Command, std::string_view> kCommands[] = {
    {Command::equilibrium, "equilibrium"}, {Command::social_opt, "social_opt"},
    {Command::optimal_toll, "optimal_toll"}, {Command::simulate, "simulate"},
    {Command::ode_flow, "ode_flow"},       {Command::ode_toll, "ode_toll"},
    {Command::verify, "verify"},
};

std::string fmt(double x) { return format_double(x); }

bool all_affine(const CoDag& codag) {
    return std::all_of(codag.network().arcs.begin(), codag.network().arcs.end(),
                       [](const OriginalArc& a) { return a.latency.is_affine(); });
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidOptions("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw InvalidOptions("write failed for '" + path.string() + "'");
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

/// Prepared configuration: defaults filled and validated against the CoDAG.
SimConfig prepare_config(const CoDag& codag, const ExperimentSetup& setup, std::ostream& log) {
    SimConfig cfg = setup.params;
    cfg.K = resolve_gains(codag, setup.gains);
    if (cfg.toll_rule == TollRule::affine && !all_affine(codag)) cfg.toll_rule = TollRule::marginal;
    for (const std::string& w : validate_config(codag, cfg)) log << "warning: " << w << '\n';
    return cfg;
}

json flow_json(const CoDag& codag, std::span<const double> w) {
    return {{"codag", json_array(w)}, {"original", json_array(aggregate_flow(codag, w))}};
}

json run_equilibrium(const CoDag& codag, const SimConfig& cfg) {
    const EquilibriumResult r = solve_equilibrium(codag, cfg.p0, cfg.beta);
    return {{"p", json_array(cfg.p0)},
            {"w_bar", flow_json(codag, r.w_bar)},
            {"xi_bar", json_array(r.xi_bar)},
            {"z", json_array(r.z.z)},
            {"potential", r.potential},
            {"vi_residual", r.vi_residual},
            {"fixed_point_residual", r.fixed_point_residual},
            {"iterations", r.iterations},
            {"used_fallback", r.used_fallback}};
}

json run_social(const CoDag& codag, const SimConfig& cfg) {
    const SocialOptimumResult r = solve_social_optimum(codag, cfg.beta);
    return {{"w", flow_json(codag, r.w)},
            {"objective", r.objective},
            {"gap", r.gap},
            {"iterations", r.iterations}};
}

json run_toll(const CoDag& codag, const SimConfig& cfg) {
    const OptimalTollResult r = solve_optimal_toll(codag, cfg.beta);
    const EquilibriumResult untolled =
        solve_equilibrium(codag, TollVector(codag.num_original_arcs(), 0.0), cfg.beta);
    return {{"p_bar", json_array(r.p_bar)},
            {"w_at_p_bar", flow_json(codag, r.w_at_p_bar)},
            {"w_untolled", flow_json(codag, untolled.w_bar)},
            {"fixed_point_residual", r.fixed_point_residual},
            {"social_gap", r.social_gap},
            {"social_gap_arcwise", r.social_gap_arcwise},
            {"iterations", r.iterations}};
}

json run_simulate(const CoDag& codag, const SimConfig& cfg, const std::filesystem::path& dir,
                  json& config) {
    const SimReference ref = solve_reference(codag, cfg.beta);
    const SimTrace trace = simulate(codag, cfg, ref);

    std::ostringstream csv;
    write_trace_csv(csv, codag, trace);
    write_file(dir / "trace.csv", csv.str());
    config.update(json::parse(trace_config_json(codag, trace)));
    write_file(dir / "config.json", config.dump(2) + "\n");

    const auto& recs = trace.records;
    const std::size_t tail_from = recs.size() / 2;
    double tail = 0.0;
    for (std::size_t n = tail_from; n < recs.size(); ++n) tail += recs[n].dist_xi + recs[n].dist_p;
    tail /= static_cast<double>(recs.size() - tail_from);
    const SimRecord& last = recs.back();
    return {{"reference", {{"xi_bar", json_array(ref.xi_bar)}, {"p_bar", json_array(ref.p_bar)}}},
            {"final", {{"step", last.step},
                       {"xi", json_array(last.xi)},
                       {"W", json_array(last.W)},
                       {"W_orig", json_array(last.W_orig)},
                       {"P", json_array(last.P)}}},
            {"initial_distance", recs.front().dist_xi + recs.front().dist_p},
            {"tail_mean_distance", tail},
            {"tail_from_step", recs[tail_from].step},
            {"bound_checks", trace.bound_checks},
            {"bounds", {{"toll_cap", trace.bounds.toll_cap}, {"cost_cap", trace.bounds.cost_cap}}}};
}

json run_ode_flow(const CoDag& codag, const SimConfig& cfg, const ExperimentSetup& setup) {
    const double t_end = setup.t_end > 0 ? setup.t_end : 30.0;
    const FlowOdeTrajectory tr = integrate_flow_ode(codag, cfg.p0, cfg, t_end, setup.dt, 100);
    const LyapunovReport rep = lyapunov_report(tr);
    return {{"p", json_array(cfg.p0)},
            {"t", json_array(tr.t)},
            {"F", json_array(tr.F)},
            {"w_final", flow_json(codag, tr.w.back())},
            {"w_equilibrium", flow_json(codag, tr.w_equilibrium)},
            {"terminal_error", tr.terminal_error},
            {"max_increase", rep.max_increase},
            {"lyapunov_passed", rep.passed}};
}

json run_ode_toll(const CoDag& codag, const SimConfig& cfg, const ExperimentSetup& setup) {
    const double t_end = setup.t_end > 0 ? setup.t_end : 5.0;
    const double dt = setup.dt > 0 ? setup.dt : 0.01;
    const TollOdeTrajectory tr = integrate_toll_ode(codag, cfg.p0, cfg.beta, t_end, dt);
    const LyapunovReport rep = lyapunov_report(tr);
    json p = json::array();
    for (const TollVector& v : tr.p) p.push_back(json_array(v));
    return {{"t", json_array(tr.t)},
            {"p", std::move(p)},
            {"V", json_array(tr.V)},
            {"p_bar", json_array(tr.p_bar)},
            {"max_increase", rep.max_increase},
            {"fitted_rate", rep.fitted_rate},
            {"lyapunov_passed", rep.passed}};
}

template <class Fn>
PropertyVerdict property(std::string name, Fn&& fn) {
    PropertyVerdict v;
    v.name = std::move(name);
    try {
        std::tie(v.passed, v.detail) = fn();
    } catch (const std::exception& e) {
        v.passed = false;
        v.detail = e.what();
    }
    return v;
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
    for (const auto& [c, n] : kCommands) {
        if (n == name) return c;
    }
    return std::nullopt;
}

std::string_view command_name(Command command) {
    for (const auto& [c, n] : kCommands) {
        if (c == command) return n;
    }
    return "unknown";
}

std::vector<double> resolve_gains(const CoDag& codag, std::string_view text) {
    if (text.starts_with("graded:")) {
        const double ratio = parse_double(text.substr(7));
        return height_graded_gains(codag, ratio);
    }
    std::vector<double> values;
    std::string_view rest = text;
    for (;;) {
        const auto comma = rest.find(',');
        try {
            values.push_back(parse_double(rest.substr(0, comma)));
        } catch (const ParseError&) {
            throw InvalidOptions("cannot read gain list '" + std::string(text) + "'");
        }
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (values.size() == 1) return std::vector<double>(codag.num_nodes(), values[0]);
    if (values.size() != codag.num_nodes())
        throw DimensionMismatch("K", codag.num_nodes(), values.size());
    return values;
}

std::vector<PropertyVerdict> verify_properties(const CoDag& codag, const ExperimentSetup& setup) {
    std::ostringstream sink;
    const SimConfig cfg = prepare_config(codag, setup, sink);
    const double beta = cfg.beta;
    const double g = codag.demand();
    const TollVector zero(codag.num_original_arcs(), 0.0);
    std::vector<PropertyVerdict> out;

    out.push_back(property("route_preservation", [&] {
        auto a = codag_routes(codag);
        auto b = enumerate_acyclic_routes(codag.network());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        return std::pair{a == b, std::to_string(a.size()) + " CoDAG routes, " +
                                     std::to_string(b.size()) + " acyclic routes"};
    }));

    out.push_back(property("equilibrium_certificate", [&] {
        const EquilibriumResult r = solve_equilibrium(codag, zero, beta);
        const FlowPolytopePoint direct = minimize_potential(codag, zero, beta);
        const double agree = max_abs_diff(r.w_bar, direct);
        const double poly = polytope_violation(codag, r.w_bar);
        const bool ok = r.vi_residual <= 1e-6 && agree <= 1e-7 && poly <= 1e-10 * g;
        return std::pair{ok, "vi " + fmt(r.vi_residual) + ", direct minimiser gap " + fmt(agree) +
                                 ", polytope " + fmt(poly)};
    }));

    out.push_back(property("monotonicity", [&] {
        const MonotonicityReport r = check_monotonicity(codag, beta, setup.trials, cfg.seed);
        return std::pair{r.passed, std::to_string(r.trials) + " pairs, max inner product " +
                                       fmt(r.max_inner_product)};
    }));

    out.push_back(property("optimal_toll_uniqueness", [&] {
        const double cap = toll_cap(codag);
        const CounterRng rng(cfg.seed);
        const auto n = static_cast<std::size_t>(setup.starts);
        std::vector<OptimalTollResult> results(n);
        parallel_for(n, [&](std::size_t s) {
            TollVector p0(codag.num_original_arcs());
            for (std::size_t k = 0; k < p0.size(); ++k) p0[k] = rng.uniform(0.0, cap, 1000 + s, k);
            results[s] = solve_optimal_toll(codag, beta, {}, std::span<const double>(p0));
        });
        double spread = 0.0, residual = 0.0, social = 0.0;
        for (const OptimalTollResult& r : results) {
            spread = std::max(spread, max_abs_diff(r.p_bar, results.front().p_bar));
            residual = std::max(residual, r.fixed_point_residual);
            social = std::max(social, r.social_gap);
        }
        const bool ok = spread <= 1e-6 && residual <= 1e-8 && social <= 1e-6;
        return std::pair{ok, std::to_string(n) + " starts, spread " + fmt(spread) + ", residual " +
                                 fmt(residual) + ", social gap " + fmt(social)};
    }));

    out.push_back(property("flow_lyapunov", [&] {
        const double t_end = setup.t_end > 0 ? setup.t_end : 30.0;
        const FlowOdeTrajectory tr = integrate_flow_ode(codag, zero, cfg, t_end, setup.dt, 1000);
        const LyapunovReport rep = lyapunov_report(tr);
        const bool ok = rep.passed && tr.terminal_error <= 1e-6;
        return std::pair{ok, "max F increase " + fmt(rep.max_increase) + ", terminal error " +
                                 fmt(tr.terminal_error)};
    }));

    if (all_affine(codag)) {
        out.push_back(property("toll_lyapunov", [&] {
            const TollOdeTrajectory tr = integrate_toll_ode(codag, zero, beta, 3.0, 0.01);
            const LyapunovReport rep = lyapunov_report(tr);
            return std::pair{rep.passed, "fitted rate " + fmt(rep.fitted_rate) +
                                             ", max increase " + fmt(rep.max_increase)};
        }));
    }

    out.push_back(property("trajectory_bounds_and_determinism", [&] {
        SimConfig short_cfg = cfg;
        short_cfg.horizon = std::min<long>(cfg.horizon, 500);
        const SimTrace a = simulate(codag, short_cfg);
        const SimTrace b = simulate(codag, short_cfg);
        std::ostringstream ca, cb;
        write_trace_csv(ca, codag, a);
        write_trace_csv(cb, codag, b);
        const bool same = ca.str() == cb.str();
        return std::pair{same, std::to_string(a.bound_checks) + " bound checks, traces " +
                                   (same ? "identical" : "differ")};
    }));
    return out;
}

RunOutcome run(const ExperimentSetup& setup, std::ostream& log) {
    RunOutcome outcome;
    try {
        const OriginalNetwork net = load_network(setup.network);
        const CoDag codag = build_codag(net);
        const SimConfig cfg = prepare_config(codag, setup, log);

        std::error_code ec;
        std::filesystem::create_directories(setup.output_dir, ec);
        if (ec) throw InvalidOptions("cannot create '" + setup.output_dir.string() + "'");

        json config{{"command", std::string(command_name(setup.command))},
                    {"network_source", setup.network},
                    {"network", json::parse(network_to_json(net))},
                    {"sim_config", detail::sim_config_to_json(cfg)},
                    {"codag_arcs", detail::codag_arcs_to_json(codag)},
                    {"threads", worker_count()}};
        write_file(setup.output_dir / "config.json", config.dump(2) + "\n");

        json result;
        switch (setup.command) {
            case Command::equilibrium: result = run_equilibrium(codag, cfg); break;
            case Command::social_opt: result = run_social(codag, cfg); break;
            case Command::optimal_toll: result = run_toll(codag, cfg); break;
            case Command::simulate:
                result = run_simulate(codag, cfg, setup.output_dir, config);
                break;
            case Command::ode_flow: result = run_ode_flow(codag, cfg, setup); break;
            case Command::ode_toll: result = run_ode_toll(codag, cfg, setup); break;
            case Command::verify: {
                outcome.verdicts = verify_properties(codag, setup);
                json verdicts = json::array();
                bool ok = true;
                for (const PropertyVerdict& v : outcome.verdicts) {
                    verdicts.push_back({{"name", v.name}, {"passed", v.passed}, {"detail", v.detail}});
                    log << (v.passed ? "PASS " : "FAIL ") << v.name << ": " << v.detail << '\n';
                    ok = ok && v.passed;
                }
                result = {{"properties", std::move(verdicts)}, {"passed", ok}};
                if (!ok) {
                    outcome.exit_code = kExitPropertyFailure;
                    outcome.message = "property suite failed";
                }
                break;
            }
        }
        result["command"] = std::string(command_name(setup.command));
        write_file(setup.output_dir / "result.json", result.dump(2) + "\n");
    } catch (const NonConvergence& e) {
        outcome.exit_code = kExitNonConvergence;
        outcome.message = e.what();
    } catch (const NonFiniteState& e) {
        outcome.exit_code = kExitNonConvergence;
        outcome.message = e.what();
    } catch (const BoundViolation& e) {
        outcome.exit_code = kExitPropertyFailure;
        outcome.message = e.what();
    } catch (const LyapunovViolation& e) {
        outcome.exit_code = kExitPropertyFailure;
        outcome.message = e.what();
    } catch (const StepTooLarge& e) {
        outcome.exit_code = kExitPropertyFailure;
        outcome.message = e.what();
    } catch (const SocialGapViolation& e) {
        outcome.exit_code = kExitPropertyFailure;
        outcome.message = e.what();
    } catch (const Error& e) {
        outcome.exit_code = kExitConfig;
        outcome.message = e.what();
    }
    if (!outcome.message.empty()) log << "error: " << outcome.message << '\n';
    return outcome;
}

}  // namespace tolldag
