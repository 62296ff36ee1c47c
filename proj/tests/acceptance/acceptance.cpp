// Acceptance checks. Run with a criterion number (1-8) or with no argument
// for all of them. Prints one PASS/FAIL line per criterion and exits nonzero
// if any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bubble/analysis.hpp"
#include "bubble/error.hpp"
#include "bubble/integrator.hpp"
#include "bubble/mc.hpp"
#include "bubble/model.hpp"
#include "bubble/regime.hpp"
#include "bubble/scenario.hpp"
#include "bubble/stats.hpp"

using namespace bubble;
namespace fs = std::filesystem;

namespace {

const ModelParams kRegime1{4.0, 3.0, 5.0};
const ResponseSpec kCubic{0.4, 1, false};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            detail << " [failed: " << what << "]";
        }
    }
};

ModelParams with_sigma(ModelParams p, double sigma) {
    p.sigma = sigma;
    return p;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Roots of the regime-1 model against the reported figures.
Outcome roots() {
    Outcome o;
    const auto start = Clock::now();
    const RootSet r = solve_roots(kRegime1, kCubic);
    const double elapsed = seconds_since(start);
    const double reported[6] = {-12.0, -7.5, -0.5, 0.5, 2.0, 3.0};
    const double got[6] = {r.x1, r.x2, r.x3, r.x4, r.x5, r.x6};
    for (int i = 0; i < 6; ++i) {
        o.require(std::abs(got[i] - reported[i]) <= 1.0, "x" + std::to_string(i + 1) + " = " + fmt(got[i]));
    }
    double worst = 0.0;
    for (double x : {r.x2, r.x3, r.x4}) {
        worst = std::max(worst, std::abs(kRegime1.nu * response_value(kCubic, x) - x));
    }
    for (double x : {r.x1, r.x5, r.x6}) {
        worst = std::max(worst, std::abs(kRegime1.nu * response_value(kCubic, x) - x - kRegime1.mu));
    }
    o.require(worst < 1e-8, "residual " + fmt(worst));
    o.require(elapsed < 1.0, "runtime");
    o.detail << " x = (" << fmt(r.x1) << ", " << fmt(r.x2) << ", " << fmt(r.x3) << ", " << fmt(r.x4) << ", "
             << fmt(r.x5) << ", " << fmt(r.x6) << "), max residual " << fmt(worst) << ", " << fmt(elapsed) << " s";
    return o;
}

Outcome deterministic() {
    Outcome o;
    const auto start = Clock::now();
    const Analysis a = analyze(kRegime1, kCubic);
    const auto checks = deterministic_suite(with_sigma(kRegime1, 0.0), kCubic, a.roots, a.scales);
    const double elapsed = seconds_since(start);
    o.require(checks.size() == 5, "expected five checks");
    int passed = 0;
    for (const auto& c : checks) {
        passed += c.passed ? 1 : 0;
        o.require(c.passed, c.name + ": " + c.detail);
    }
    o.require(elapsed < 10.0, "runtime");
    o.detail << " " << passed << "/" << checks.size() << " checks, " << fmt(elapsed) << " s";
    return o;
}

Outcome corridor() {
    Outcome o;
    const auto start = Clock::now();
    const std::vector<double> cs{0.0, 0.5, 1.0, 2.0};
    const std::vector<double> bs{0.5, 1.0, 2.0};
    const auto grid = empirical_corridor_grid(cs, bs, 1.0, 100000, 1e-4, 2024);
    const double elapsed = seconds_since(start);
    int dominated = 0;
    for (std::size_t ic = 0; ic < cs.size(); ++ic) {
        for (std::size_t ib = 0; ib < bs.size(); ++ib) {
            const McEstimate& e = grid[ic * bs.size() + ib];
            const double bound = girsanov_lower_bound(cs[ic], bs[ib], 1.0);
            const bool ok = e.p_hat - e.ci_halfwidth >= bound;
            dominated += ok ? 1 : 0;
            o.require(ok, "c=" + fmt(cs[ic]) + " b=" + fmt(bs[ib]) + ": p_hat " + fmt(e.p_hat) + " < bound " +
                              fmt(bound));
        }
    }
    const double spot = girsanov_lower_bound(1.0, 1.0, 1.0);
    o.require(std::abs(spot - 0.152334) <= 1e-6, "spot bound(1,1,1) = " + fmt(spot) + ", expected 0.152334");
    o.require(elapsed < 120.0, "runtime");
    o.detail << " " << dominated << "/12 grid points dominated, " << fmt(elapsed) << " s";
    return o;
}

Outcome ignition_collapse() {
    Outcome o;
    const auto start = Clock::now();
    const Analysis a = analyze(kRegime1, kCubic);
    McConfig cfg;
    cfg.replicates = 100000;
    cfg.base_seed = 11;
    const BoundReport ig = estimate_ignition_probability(kRegime1, kCubic, a.roots, a.scales, cfg);
    const BoundReport co = estimate_collapse_probability(kRegime1, kCubic, a.roots, a.scales, cfg);
    o.require(ig.dominates, "ignition p_hat " + fmt(ig.empirical.p_hat) + " vs bound " + fmt(ig.analytic_bound));
    o.require(co.dominates, "collapse p_hat " + fmt(co.empirical.p_hat) + " vs bound " + fmt(co.analytic_bound));
    o.detail << " ignition " << fmt(ig.empirical.p_hat) << " >= " << fmt(ig.analytic_bound) << ", collapse "
             << fmt(co.empirical.p_hat) << " >= " << fmt(co.analytic_bound) << ";";

    cfg.replicates = 10000;
    double prev_ig = -1.0, prev_co = -1.0;
    for (double sigma : {2.0, 3.0, 4.0}) {
        const ModelParams p = with_sigma(kRegime1, sigma);
        const double pi = estimate_ignition_probability(p, kCubic, a.roots, a.scales, cfg).empirical.p_hat;
        const double pc = estimate_collapse_probability(p, kCubic, a.roots, a.scales, cfg).empirical.p_hat;
        o.require(pi > prev_ig, "ignition not increasing at sigma " + fmt(sigma));
        o.require(pc > prev_co, "collapse not increasing at sigma " + fmt(sigma));
        o.detail << " s=" << fmt(sigma) << ": " << fmt(pi) << "/" << fmt(pc);
        prev_ig = pi;
        prev_co = pc;
    }
    const double elapsed = seconds_since(start);
    o.require(elapsed < 600.0, "runtime");
    o.detail << ", " << fmt(elapsed) << " s";
    return o;
}

Outcome stability() {
    Outcome o;
    const auto start = Clock::now();
    const Analysis a = analyze(kRegime1, kCubic);
    McConfig cfg;
    cfg.replicates = 10000;
    cfg.base_seed = 5;
    for (RegimeLabel regime : {RegimeLabel::MeanReversion, RegimeLabel::Bubble, RegimeLabel::Collapse}) {
        const std::string name(to_string(regime));
        const double at_zero =
            estimate_regime_stability(regime, with_sigma(kRegime1, 0.0), kCubic, a.roots, a.scales, cfg)
                .empirical.p_hat;
        const double near_zero =
            estimate_regime_stability(regime, with_sigma(kRegime1, 0.01), kCubic, a.roots, a.scales, cfg)
                .empirical.p_hat;
        o.require(at_zero == 1.0 && near_zero >= 0.99, name + " does not tend to 1 as sigma -> 0");
        o.detail << " " << name << ": 0->" << fmt(at_zero) << " 0.01->" << fmt(near_zero);
        double prev = near_zero;
        for (double sigma : {0.5, 1.0, 2.0, 3.0}) {
            const BoundReport b =
                estimate_regime_stability(regime, with_sigma(kRegime1, sigma), kCubic, a.roots, a.scales, cfg);
            o.require(b.empirical.p_hat <= prev, name + " increases at sigma " + fmt(sigma));
            o.detail << " " << fmt(sigma) << "->" << fmt(b.empirical.p_hat);
            prev = b.empirical.p_hat;
            if (regime == RegimeLabel::Bubble && sigma == 3.0) {
                const double bound = stability_bound(a.scales.delta_b, 3.0, 1.0);
                o.require(b.empirical.p_hat >= bound,
                          "bubble p_hat " + fmt(b.empirical.p_hat) + " below " + fmt(bound) + " at sigma 3");
            }
        }
        o.detail << ";";
    }
    const double elapsed = seconds_since(start);
    o.require(elapsed < 600.0, "runtime");
    o.detail << " " << fmt(elapsed) << " s";
    return o;
}

Outcome phenomenology() {
    Outcome o;
    const auto start = Clock::now();

    {
        const ScenarioBundle b = make_preset("regime2");
        const Analysis a = analyze(b.params, b.spec, b.c_m);
        int without = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            SimConfig sim = b.sim;
            sim.horizon = 200.0;
            sim.noise.seed = seed;
            const Trajectory t = simulate(b.params, b.spec, b.schedule, sim);
            without += has_sustained_bubble(classify_segments(t, a.roots, a.scales)) ? 0 : 1;
        }
        o.require(without > 50, "regime2 sustained bubbles in " + std::to_string(100 - without) + "/100 seeds");
        o.detail << " regime2 no sustained bubble " << without << "/100;";
    }

    for (const char* name : {"regime3-a", "regime3-b"}) {
        const ScenarioBundle b = make_preset(name);
        ModelParams ou = b.params;
        ou.nu = 0.0;
        int louder = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            SimConfig sim = b.sim;
            sim.noise.seed = seed;
            const double vb = unit_return_volatility(simulate(b.params, b.spec, b.schedule, sim));
            const double vo = unit_return_volatility(simulate(ou, b.spec, b.schedule, sim));
            louder += vb > vo ? 1 : 0;
        }
        o.require(louder > 50, std::string(name) + " volatility above OU in only " + std::to_string(louder) + "/100");
        o.detail << " " << name << " volatility > OU " << louder << "/100;";
    }

    {
        const ScenarioBundle b = make_preset("regime1-serial");
        const Analysis a = analyze(b.params, b.spec, b.c_m);
        std::uint64_t windows[4] = {0, 0, 0, 0};
        int serial_runs = 0;
        for (std::uint64_t seed = 1; seed <= 200; ++seed) {
            SimConfig sim = b.sim;
            sim.noise.seed = seed;
            const Trajectory t = simulate(b.params, b.spec, b.schedule, sim);
            const SegmentationReport r = classify_segments(t, a.roots, a.scales);
            for (RegimeLabel l : r.window_labels) {
                ++windows[static_cast<int>(l)];
            }
            serial_runs += serial_bubble_ignitions(t, r).empty() ? 0 : 1;
        }
        o.require(windows[0] > 0, "no MeanReversion window in any regime1 run");
        o.require(windows[1] > 0, "no Bubble window in any regime1 run");
        o.require(windows[2] > 0, "no Collapse window in any regime1 run");
        o.require(serial_runs >= 1, "no serial bubble in 200 regime1 runs");
        o.detail << " regime1 windows MR/B/C/T " << windows[0] << "/" << windows[1] << "/" << windows[2] << "/"
                 << windows[3] << ", serial bubbles in " << serial_runs << "/200;";
    }

    const double elapsed = seconds_since(start);
    o.require(elapsed < 300.0, "runtime");
    o.detail << " " << fmt(elapsed) << " s";
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    Outcome o;
    const auto start = Clock::now();
    ScenarioBundle b = make_preset("regime3-a");
    b.sim.horizon = 50.0;
    set_seed(b, 77);
    const fs::path root = fs::temp_directory_path() / "bubble_acceptance_threads";
    fs::remove_all(root);
    std::vector<RunReport> reports;
    for (unsigned threads : {1u, 4u, 16u}) {
        RunOptions opt;
        opt.mc_replicates = 2000;
        opt.threads = threads;
        reports.push_back(run_scenario(b, root / std::to_string(threads), opt));
    }
    std::size_t compared = 0;
    for (const auto& f : reports[0].files) {
        const std::string name = fs::path(f).filename().string();
        const std::string ref = slurp(root / "1" / name);
        o.require(!ref.empty(), name + " is empty");
        for (const char* t : {"4", "16"}) {
            o.require(slurp(root / t / name) == ref, name + " differs with " + t + " threads");
        }
        ++compared;
    }
    o.require(compared >= 4, "expected CSV, SVG and JSON outputs");
    fs::remove_all(root);
    o.detail << " " << compared << " files identical across 1/4/16 threads, " << fmt(seconds_since(start)) << " s";
    return o;
}

Outcome noise_family() {
    Outcome o;
    const auto start = Clock::now();
    const ScenarioBundle b = make_preset("regime3-a");
    const Analysis a = analyze(b.params, b.spec, b.c_m);
    McConfig cfg = b.mc;
    cfg.replicates = 10000;
    cfg.base_seed = 99;
    struct Stat {
        std::string name;
        std::function<McEstimate(const McConfig&)> run;
    };
    const std::vector<Stat> stats{
        {"mean-reversion",
         [&](const McConfig& c) {
             return estimate_regime_stability(RegimeLabel::MeanReversion, b.params, b.spec, a.roots, a.scales, c)
                 .empirical;
         }},
        {"bubble",
         [&](const McConfig& c) {
             return estimate_regime_stability(RegimeLabel::Bubble, b.params, b.spec, a.roots, a.scales, c).empirical;
         }},
        {"collapse",
         [&](const McConfig& c) {
             return estimate_regime_stability(RegimeLabel::Collapse, b.params, b.spec, a.roots, a.scales, c)
                 .empirical;
         }},
        {"ignition",
         [&](const McConfig& c) {
             return estimate_scenario(McScenario::Ignition, b.params, b.spec, a.roots, a.scales, c);
         }},
        {"collapse-transition",
         [&](const McConfig& c) {
             return estimate_scenario(McScenario::CollapseTransition, b.params, b.spec, a.roots, a.scales, c);
         }},
    };
    for (const auto& s : stats) {
        McConfig g = cfg;
        g.noise = NoiseFamily::Gaussian;
        McConfig u = cfg;
        u.noise = NoiseFamily::UniformCentered;
        const McEstimate eg = s.run(g);
        const McEstimate eu = s.run(u);
        const double se = std::sqrt(eg.p_hat * (1 - eg.p_hat) / static_cast<double>(eg.n) +
                                    eu.p_hat * (1 - eu.p_hat) / static_cast<double>(eu.n));
        const double diff = std::abs(eg.p_hat - eu.p_hat);
        o.require(diff <= 3.0 * se, s.name + " differs by " + fmt(diff) + " > 3 se " + fmt(3.0 * se));
        o.detail << " " << s.name << " " << fmt(eg.p_hat) << "/" << fmt(eu.p_hat) << ";";
    }
    o.detail << " " << fmt(seconds_since(start)) << " s";
    return o;
}

struct Criterion {
    const char* title;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"root reproduction", roots},
    {"deterministic theorem suite", deterministic},
    {"corridor lemma domination", corridor},
    {"ignition/collapse bound domination", ignition_collapse},
    {"regime stability scaling", stability},
    {"qualitative regime phenomenology", phenomenology},
    {"thread-count determinism", determinism},
    {"noise-family robustness", noise_family},
};

}  // namespace

int main(int argc, char** argv) {
    int first = 1, last = 8;
    if (argc > 1) {
        first = last = std::atoi(argv[1]);
        if (first < 1 || first > 8) {
            std::fprintf(stderr, "usage: %s [1-8]\n", argv[0]);
            return 2;
        }
    }
    int failures = 0;
    for (int i = first; i <= last; ++i) {
        const Criterion& c = kCriteria[i - 1];
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.passed = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        std::printf("criterion %d (%s): %s%s\n", i, c.title, o.passed ? "PASS" : "FAIL", o.detail.str().c_str());
        std::fflush(stdout);
        failures += o.passed ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
