// toll-dag: command-line front end for the tolldag library.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tolldag/errors.hpp"
#include "tolldag/experiment.hpp"
#include "tolldag/trace_io.hpp"

namespace {

bool parse_eta(const std::string& text, double& low, double& high) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) return false;
    try {
        low = tolldag::parse_double(text.substr(0, comma));
        high = tolldag::parse_double(text.substr(comma + 1));
    } catch (const tolldag::ParseError&) {
        return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Arc-based traffic assignment, marginal-cost tolling and adaptive toll dynamics"};
    app.set_version_flag("--version", "toll-dag 0.1.0");

    tolldag::ExperimentSetup setup;
    std::string command;
    std::string eta = "0,0.1";
    std::string toll_rule = "affine";
    bool no_bounds = false;

    app.add_option("command", command,
                   "equilibrium | social_opt | optimal_toll | simulate | ode_flow | ode_toll | verify")
        ->required();
    app.add_option("--network", setup.network, "builtin name or network JSON file")
        ->capture_default_str();
    app.add_option("--beta", setup.params.beta, "logit dispersion")->capture_default_str();
    app.add_option("--gamma", setup.params.gamma, "toll step size")->capture_default_str();
    app.add_option("--eta", eta, "choice step range low,high")->capture_default_str();
    app.add_option("--K", setup.gains, "node gains: scalar, per-node list, or graded:<ratio>")
        ->capture_default_str();
    app.add_option("--horizon", setup.params.horizon, "simulation steps")->capture_default_str();
    app.add_option("--seed", setup.params.seed, "random seed")->capture_default_str();
    app.add_option("--out", setup.output_dir, "output directory")->capture_default_str();
    app.add_option("--t-end", setup.t_end, "ODE horizon (0: command default)");
    app.add_option("--dt", setup.dt, "ODE step (0: command default)");
    app.add_option("--trials", setup.trials, "monotonicity pairs for verify")->capture_default_str();
    app.add_option("--starts", setup.starts, "toll initialisations for verify")->capture_default_str();
    app.add_option("--toll-rule", toll_rule, "affine | marginal")
        ->check(CLI::IsMember({"affine", "marginal"}))
        ->capture_default_str();
    app.add_flag("--no-bound-checks", no_bounds, "skip trajectory bound assertions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return tolldag::kExitConfig;
    }

    const auto cmd = tolldag::parse_command(command);
    if (!cmd) {
        std::cerr << "error: unknown command '" << command << "'\n";
        return tolldag::kExitConfig;
    }
    setup.command = *cmd;
    if (!parse_eta(eta, setup.params.eta_low, setup.params.eta_high)) {
        std::cerr << "error: --eta expects low,high\n";
        return tolldag::kExitConfig;
    }
    setup.params.toll_rule =
        toll_rule == "marginal" ? tolldag::TollRule::marginal : tolldag::TollRule::affine;
    setup.params.check_bounds = !no_bounds;

    const tolldag::RunOutcome outcome = tolldag::run(setup, std::cerr);
    if (outcome.exit_code == tolldag::kExitOk)
        std::cout << "wrote " << (setup.output_dir / "result.json").string() << '\n';
    return outcome.exit_code;
}
