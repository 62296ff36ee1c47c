#include "bubble/scenario.hpp"

#include <cstdio>

#include "bubble/error.hpp"
#include "bubble/regime.hpp"
#include "bubble/svg.hpp"

namespace bubble {

namespace {

ScenarioBundle base(std::string name, ModelParams params, ResponseSpec spec, double horizon, bool paired) {
    ScenarioBundle b;
    b.name = std::move(name);
    b.params = params;
    b.spec = spec;
    b.sim.horizon = horizon;
    b.sim.noise.seed = 1;
    b.mc.base_seed = 1;
    b.paired_ou = paired;
    return b;
}

const ModelParams kRegime1{4.0, 3.0, 5.0};
const ResponseSpec kCubic04{0.4, 1, false};
const ModelParams kRegime2{0.2, 20.0, 0.6};
const ModelParams kRegime3a{0.23, 2.0, 0.6};
const ModelParams kRegime3b{0.15, 2.0, 0.42};
const ResponseSpec kQuintic90{90.0, 2, false};
const ResponseSpec kCubic90{90.0, 1, false};

constexpr double kJumpTime = 20.0;
constexpr double kSmallJump = 0.02;
constexpr double kLargeJump = 0.6;

std::string title_of(const ScenarioBundle& b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: mu=%g sigma=%g nu=%g, S=arctan(%g x^%d)", b.name.c_str(), b.params.mu,
                  b.params.sigma, b.params.nu, b.spec.d, 2 * b.spec.n + 1);
    return buf;
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"regime1",    "regime1-serial", "regime2",
                                                   "regime3-a",  "regime3-b",      "jump-small",
                                                   "jump-large", "varying-p0",     "deterministic-suite"};
    return names;
}

ScenarioBundle make_preset(std::string_view name) {
    if (name == "regime1") {
        return base("regime1", kRegime1, kCubic04, 500.0, false);
    }
    if (name == "regime1-serial") {
        return base("regime1-serial", kRegime1, kCubic04, 2000.0, false);
    }
    if (name == "regime2") {
        return base("regime2", kRegime2, kQuintic90, 200.0, true);
    }
    if (name == "regime3-a") {
        return base("regime3-a", kRegime3a, kQuintic90, 200.0, true);
    }
    if (name == "regime3-b") {
        return base("regime3-b", kRegime3b, kCubic90, 200.0, true);
    }
    if (name == "jump-small" || name == "jump-large") {
        ScenarioBundle b = base(std::string(name), kRegime3a, kQuintic90, 60.0, true);
        b.schedule = JumpFundamental{0.0, name == "jump-small" ? kSmallJump : kLargeJump, kJumpTime};
        return b;
    }
    if (name == "varying-p0") {
        ScenarioBundle b = base("varying-p0", kRegime3b, kCubic90, 200.0, true);
        b.schedule = RandomWalkFundamental{0.0, 0.02, 0.1, 1};
        return b;
    }
    if (name == "deterministic-suite") {
        ModelParams quiet = kRegime1;
        quiet.sigma = 0.0;
        ScenarioBundle b = base("deterministic-suite", quiet, kCubic04, 30.0, false);
        b.sim.history = LinearHistory{0.0, 2.5};
        return b;
    }
    throw Error(ErrorCode::ConfigInvalid, "unknown preset \"" + std::string(name) + "\"");
}

void set_seed(ScenarioBundle& bundle, std::uint64_t seed) {
    bundle.sim.noise.seed = seed;
    bundle.mc.base_seed = seed;
    if (auto* walk = std::get_if<RandomWalkFundamental>(&bundle.schedule)) {
        walk->seed = seed;
    }
}

RunReport run_scenario(const ScenarioBundle& bundle, const std::filesystem::path& output_dir,
                       const RunOptions& options) {
    RunReport rep;
    rep.preset = bundle.name;
    rep.seed = bundle.sim.noise.seed;
    rep.config_json = bundle_to_json(bundle);
    rep.warnings = validate_schedule(bundle.schedule, bundle.params, bundle.sim.horizon);

    rep.analysis = analyze(bundle.params, bundle.spec, bundle.c_m);
    const RootSet& roots = rep.analysis.roots;
    const Scales& scales = rep.analysis.scales;
    if (!rep.analysis.assumptions.assumption_I_holds) {
        rep.warnings.push_back("assumption I fails: " + rep.analysis.assumptions.details);
    }
    rep.rates = heuristic_transition_rates(bundle.params, scales);

    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create " + output_dir.string() + ": " + ec.message());
    }

    if (bundle.name == "deterministic-suite") {
        rep.theorems = deterministic_suite(bundle.params, bundle.spec, roots, scales, bundle.sim.dt);
    }

    Trajectory main;
    std::optional<Trajectory> ou;
    if (bundle.paired_ou) {
        auto pair = simulate_paired_ou(bundle.params, bundle.spec, bundle.schedule, bundle.sim);
        main = std::move(pair.first);
        ou = std::move(pair.second);
    } else {
        main = simulate(bundle.params, bundle.spec, bundle.schedule, bundle.sim);
    }

    SegmentationReport seg = classify_segments(main, roots, scales);
    if (bundle.params.sigma == 0.0) {
        try {
            seg.asymptotic_slope_estimate = asymptotic_slope(main, 0.2);
        } catch (const Error&) {
        }
    }
    rep.metrics.emplace_back("saturation_flag", main.saturation_flag ? 1.0 : 0.0);
    rep.metrics.emplace_back("longest_bubble_run",
                             static_cast<double>(longest_run(seg.window_labels, RegimeLabel::Bubble)));
    rep.metrics.emplace_back("sustained_bubble", has_sustained_bubble(seg) ? 1.0 : 0.0);
    rep.metrics.emplace_back("serial_bubble_ignitions",
                             static_cast<double>(serial_bubble_ignitions(main, seg).size()));
    rep.metrics.emplace_back("unit_return_volatility", unit_return_volatility(main));
    if (ou) {
        rep.metrics.emplace_back("ou_unit_return_volatility", unit_return_volatility(*ou));
    }
    if (main.saturation_flag) {
        rep.warnings.push_back("exp(P0 - P) saturated at exp(700) during the run");
    }

    if (options.mc_replicates > 0) {
        McConfig mc = bundle.mc;
        mc.replicates = options.mc_replicates;
        mc.threads = options.threads;
        auto attempt = [&](auto&& fn) {
            try {
                rep.bounds.push_back(fn());
            } catch (const Error& e) {
                if (e.code() != ErrorCode::HypothesisUnsatisfiable) {
                    throw;
                }
                rep.warnings.push_back(e.what());
            }
        };
        for (RegimeLabel regime : {RegimeLabel::MeanReversion, RegimeLabel::Bubble, RegimeLabel::Collapse}) {
            attempt([&] { return estimate_regime_stability(regime, bundle.params, bundle.spec, roots, scales, mc); });
        }
        attempt([&] { return estimate_ignition_probability(bundle.params, bundle.spec, roots, scales, mc); });
        attempt([&] { return estimate_collapse_probability(bundle.params, bundle.spec, roots, scales, mc); });
        if (const auto* jump = std::get_if<JumpFundamental>(&bundle.schedule)) {
            attempt([&] {
                return estimate_random_jump_ignition(bundle.params, bundle.spec, roots, scales,
                                                     jump->p_plus - jump->p_minus, mc);
            });
        }
    }

    const std::string stem = bundle.name.empty() ? "run" : bundle.name;
    write_text_file(output_dir / (stem + ".csv"), trajectory_csv(main, &seg));
    rep.files.push_back(stem + ".csv");
    if (ou) {
        write_text_file(output_dir / (stem + "_ou.csv"), trajectory_csv(*ou));
        rep.files.push_back(stem + "_ou.csv");
    }
    if (options.svg) {
        std::vector<SvgSeries> series;
        series.push_back({"P", "price", main.times, main.p});
        series.push_back({"P0", "fundamental", main.times, main.p0});
        if (ou) {
            series.push_back({"OU (nu = 0)", "ou", ou->times, ou->p});
        }
        SvgOptions opts;
        opts.title = title_of(bundle);
        write_text_file(output_dir / (stem + ".svg"), render_svg(series, opts));
        rep.files.push_back(stem + ".svg");
    }
    rep.segmentation = std::move(seg);
    rep.files.push_back(stem + ".json");
    write_text_file(output_dir / (stem + ".json"), run_report_to_json(rep));
    return rep;
}

}  // namespace bubble
