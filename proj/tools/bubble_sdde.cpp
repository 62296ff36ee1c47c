// bubble-sdde: command line front end for the bubble SDDE engine.
//
//   bubble-sdde roots|simulate|mc|experiment <preset> [--seed N] [--config FILE]
//               [--out DIR] [--dt X] [--horizon T] [--svg]
//
// Exit codes: 0 success, 2 configuration error, 3 assumption violation,
// 4 I/O error, 1 anything else.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bubble/analysis.hpp"
#include "bubble/error.hpp"
#include "bubble/mc.hpp"
#include "bubble/report.hpp"
#include "bubble/scenario.hpp"

namespace {

using namespace bubble;

struct CommonArgs {
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::string config;
    std::string out = "out";
    std::optional<double> dt;
    std::optional<double> horizon;
    bool svg = false;
};

struct McArgs {
    std::uint64_t replicates = 0;
    unsigned threads = 0;
    std::vector<double> sweep;
    std::optional<double> k;
    std::string history;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("preset", args.preset, "Scenario preset")
        ->required()
        ->check(CLI::IsMember(preset_names()));
    cmd->add_option("--seed", args.seed, "Noise seed");
    cmd->add_option("--config", args.config, "JSON config applied on top of the preset");
    cmd->add_option("--out", args.out, "Output directory")->capture_default_str();
    cmd->add_option("--dt", args.dt, "Time step (1/dt must be an integer)");
    cmd->add_option("--horizon", args.horizon, "Simulated time");
    cmd->add_flag("--svg", args.svg, "Also write an SVG chart");
}

ScenarioBundle load(const CommonArgs& args) {
    ScenarioBundle b = make_preset(args.preset);
    if (!args.config.empty()) {
        b = parse_config(args.config, b);
    }
    if (args.seed) {
        set_seed(b, *args.seed);
    }
    if (args.dt) {
        b.sim.dt = *args.dt;
        b.mc.dt = *args.dt;
    }
    if (args.horizon) {
        b.sim.horizon = *args.horizon;
    }
    b.sim.validate();
    return b;
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    }
}

int run_roots(const CommonArgs& args) {
    const ScenarioBundle b = load(args);
    const Analysis a = analyze(b.params, b.spec, b.c_m);
    const std::string json = analysis_to_json(a, heuristic_transition_rates(b.params, a.scales));
    std::cout << json;
    if (!args.out.empty()) {
        ensure_dir(args.out);
        write_text_file(std::filesystem::path(args.out) / (b.name + "_roots.json"), json);
    }
    return 0;
}

int run_simulate(const CommonArgs& args, bool experiment, const McArgs& mc) {
    const ScenarioBundle b = load(args);
    RunOptions options;
    options.svg = experiment || args.svg;
    options.mc_replicates = experiment ? mc.replicates : 0;
    options.threads = mc.threads;
    const RunReport report = run_scenario(b, args.out, options);
    for (const auto& f : report.files) {
        std::cout << (std::filesystem::path(args.out) / f).string() << '\n';
    }
    for (const auto& w : report.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    bool ok = true;
    for (const auto& t : report.theorems) {
        std::cout << (t.passed ? "PASS " : "FAIL ") << t.name << ": " << t.detail << '\n';
        ok = ok && t.passed;
    }
    return ok ? 0 : 1;
}

int run_mc(const CommonArgs& args, const McArgs& mc_args) {
    ScenarioBundle b = load(args);
    if (mc_args.replicates > 0) {
        b.mc.replicates = mc_args.replicates;
    }
    if (mc_args.k) {
        b.mc.K = *mc_args.k;
    }
    if (mc_args.history == "rejection") {
        b.mc.history = HistoryMode::Rejection;
    } else if (mc_args.history == "deterministic") {
        b.mc.history = HistoryMode::Deterministic;
    }
    b.mc.threads = mc_args.threads;
    b.mc.validate();

    const Analysis a = analyze(b.params, b.spec, b.c_m);
    std::vector<double> sigmas = mc_args.sweep;
    if (sigmas.empty()) {
        sigmas.push_back(b.params.sigma);
    }
    std::vector<BoundReport> reports;
    for (double sigma : sigmas) {
        ModelParams p = b.params;
        p.sigma = sigma;
        for (RegimeLabel regime : {RegimeLabel::MeanReversion, RegimeLabel::Bubble, RegimeLabel::Collapse}) {
            reports.push_back(estimate_regime_stability(regime, p, b.spec, a.roots, a.scales, b.mc));
        }
        reports.push_back(estimate_ignition_probability(p, b.spec, a.roots, a.scales, b.mc));
        reports.push_back(estimate_collapse_probability(p, b.spec, a.roots, a.scales, b.mc));
        if (const auto* jump = std::get_if<JumpFundamental>(&b.schedule)) {
            reports.push_back(estimate_random_jump_ignition(p, b.spec, a.roots, a.scales,
                                                            jump->p_plus - jump->p_minus, b.mc));
        }
    }
    const std::string json = bounds_to_json(reports);
    std::cout << json;
    ensure_dir(args.out);
    write_text_file(std::filesystem::path(args.out) / (b.name + "_mc.json"), json);
    if (!mc_args.sweep.empty()) {
        std::string csv = "scenario,sigma,p_hat,ci_lo,ci_hi,bound,dominates\n";
        char line[256];
        for (const auto& r : reports) {
            std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.empirical.scenario.c_str(),
                          r.sigma, r.empirical.p_hat, r.empirical.ci_lo, r.empirical.ci_hi, r.analytic_bound,
                          r.dominates ? 1 : 0);
            csv += line;
        }
        write_text_file(std::filesystem::path(args.out) / (b.name + "_sweep.csv"), csv);
    }
    return 0;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigInvalid:
        case ErrorCode::ParseError: return 2;
        case ErrorCode::AssumptionIIViolated:
        case ErrorCode::RootStructure:
        case ErrorCode::NoCorridorFound:
        case ErrorCode::ScaleInconsistency: return 3;
        case ErrorCode::IoError: return 4;
        default: return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and verification engine for the bubble stochastic delay equation"};
    app.require_subcommand(1);

    CommonArgs common;
    McArgs mc;

    auto* roots = app.add_subcommand("roots", "Balance-equation roots, scales and assumption checks as JSON");
    add_common(roots, common);

    auto* simulate = app.add_subcommand("simulate", "Simulate, classify and write CSV/JSON (and SVG with --svg)");
    add_common(simulate, common);

    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo estimates against the analytic lower bounds");
    add_common(mc_cmd, common);
    mc_cmd->add_option("--replicates", mc.replicates, "Replicates per estimate");
    mc_cmd->add_option("--threads", mc.threads, "Worker threads (0: all cores)");
    mc_cmd->add_option("--sweep", mc.sweep, "Comma-separated sigma values")->delimiter(',');
    mc_cmd->add_option("--K", mc.k, "Constant in 2 Phi(delta / (K sigma)) - 1");
    mc_cmd->add_option("--history", mc.history, "deterministic or rejection")
        ->check(CLI::IsMember({"deterministic", "rejection"}));

    auto* experiment = app.add_subcommand("experiment", "Full scenario run: CSV, SVG and JSON report");
    add_common(experiment, common);
    experiment->add_option("--replicates", mc.replicates, "Add Monte Carlo bound reports with this many replicates");
    experiment->add_option("--threads", mc.threads, "Worker threads (0: all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*roots) {
            return run_roots(common);
        }
        if (*simulate) {
            return run_simulate(common, false, mc);
        }
        if (*mc_cmd) {
            return run_mc(common, mc);
        }
        return run_simulate(common, true, mc);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
