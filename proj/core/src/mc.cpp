#include "bubble/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "bubble/error.hpp"
#include "bubble/stats.hpp"

namespace bubble {

namespace {

constexpr std::uint64_t kChunk = 64;

unsigned resolve_threads(unsigned requested) {
    if (requested != 0) {
        return requested;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Calls body(worker, begin, end) over [0, n) in fixed chunks. Chunks are
// claimed dynamically, so callers must only combine results in an
// order-independent way.
template <class Body>
void parallel_chunks(std::uint64_t n, unsigned threads, Body&& body) {
    threads = static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), (n + kChunk - 1) / kChunk));
    threads = std::max(threads, 1u);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&](unsigned id) {
        try {
            for (;;) {
                const std::uint64_t begin = next.fetch_add(kChunk);
                if (begin >= n) {
                    break;
                }
                body(id, begin, std::min(n, begin + kChunk));
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next.store(n);
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back(worker, i);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

enum class Start { MeanReversion, Bubble, Collapse };

Start start_of(McScenario s) {
    switch (s) {
        case McScenario::BubbleStability:
        case McScenario::CollapseTransition: return Start::Bubble;
        case McScenario::CollapseStability: return Start::Collapse;
        default: return Start::MeanReversion;
    }
}

std::size_t units_after(McScenario s) {
    switch (s) {
        case McScenario::Ignition:
        case McScenario::CollapseTransition:
        case McScenario::LargeJump: return 2;
        default: return 1;
    }
}

struct Kernel {
    McScenario scenario;
    ModelParams params;
    ResponseSpec spec;
    RootSet roots;
    Scales scales;
    McConfig cfg;
    double p0_before = 0.0;
    double p0_after = 0.0;
    double slope = 0.0;     // history slope
    double level = 0.0;     // P(t0) of the noise-free history
    double past_bound = 0.0;  // bound on sigma max |B - B(t0-1)| under rejection; <= 0 means none
    std::size_t m = 0;
};

struct Scratch {
    std::vector<double> p, p0, lag, z;
};

double history_value(const Kernel& k, double t) { return k.level + k.slope * t; }

bool hypothesis(const Kernel& k, const Scratch& s, std::size_t first) {
    const std::size_t m = k.m;
    const auto p = std::span<const double>(s.p).subspan(first, m + 1);
    const auto p0 = std::span<const double>(s.p0).subspan(first, m + 1);
    const auto lag = std::span<const double>(s.lag).subspan(first, m + 1);
    switch (start_of(k.scenario)) {
        case Start::MeanReversion:
            return in_corridor(p, p0, k.scales.delta_m) && std::abs(p[m] - p0[m]) < k.scales.delta_m / 2.0;
        case Start::Bubble: return lag_above(lag, k.scales.a_b) && above_fundamental(p, p0);
        case Start::Collapse: return lag_below(lag, k.scales.a_c) && above_fundamental(p, p0);
    }
    return false;
}

bool event(const Kernel& k, const Scratch& s, std::size_t t0) {
    const std::size_t m = k.m;
    auto span_of = [&](const std::vector<double>& v, std::size_t from, std::size_t len) {
        return std::span<const double>(v).subspan(from, len);
    };
    const auto p_w0 = span_of(s.p, t0, m + 1);
    const auto p0_w0 = span_of(s.p0, t0, m + 1);
    const auto lag_w0 = span_of(s.lag, t0, m + 1);
    switch (k.scenario) {
        case McScenario::MeanReversionStability:
        case McScenario::SmallJump:
            return in_corridor(p_w0, p0_w0, k.scales.delta_m) &&
                   std::abs(s.p[t0 + m] - s.p0[t0 + m]) < k.scales.delta_m / 2.0;
        case McScenario::BubbleStability: return lag_above(lag_w0, k.scales.a_b);
        case McScenario::CollapseStability:
            return !above_fundamental(p_w0, p0_w0) || lag_below(lag_w0, k.scales.a_c);
        case McScenario::Ignition:
        case McScenario::LargeJump: return lag_above(span_of(s.lag, t0 + m, m + 1), k.scales.a_b);
        case McScenario::CollapseTransition:
            return !above_fundamental(span_of(s.p, t0, 2 * m + 1), span_of(s.p0, t0, 2 * m + 1)) ||
                   lag_below(span_of(s.lag, t0 + m, m + 1), k.scales.a_c);
        case McScenario::Corridor: break;
    }
    return false;
}

// Fills s.p[from+1 .. to] by Euler-Maruyama; s.p[0 .. from] must be set.
// Returns sigma max |B(t) - B(t_from)| over the stretch.
double integrate(const Kernel& k, Scratch& s, NoiseSource& noise, std::size_t from, std::size_t to) {
    const double scale = k.params.sigma * std::sqrt(k.cfg.dt);
    const std::size_t n = to - from;
    if (scale != 0.0) {
        noise.fill(std::span<double>(s.z).subspan(0, n));
    }
    bool saturated = false;
    double walk = 0.0;
    double walk_max = 0.0;
    for (std::size_t i = from; i < to; ++i) {
        const double inc = scale != 0.0 ? scale * s.z[i - from] : 0.0;
        s.p[i + 1] = euler_step(k.params, k.spec, s.p[i], s.p[i - k.m], s.p0[i], inc, k.cfg.dt, saturated);
        s.lag[i + 1] = s.p[i + 1] - s.p[i + 1 - k.m];
        walk += inc;
        walk_max = std::max(walk_max, std::abs(walk));
    }
    return walk_max;
}

// Outcome of one replicate: number of attempts used and success flag.
std::pair<std::uint64_t, bool> run_replicate(const Kernel& k, Scratch& s, std::uint64_t index) {
    const std::size_t m = k.m;
    const bool rejection = k.cfg.history == HistoryMode::Rejection;
    // Layout: [pre-history unit][burn-in unit if rejection][units after t0].
    const std::size_t t0 = rejection ? 2 * m : m;
    const std::size_t last = t0 + units_after(k.scenario) * m;
    NoiseSource noise(NoiseSpec{k.cfg.noise, k.cfg.base_seed, index});

    for (std::size_t i = 0; i <= last; ++i) {
        s.p0[i] = i >= t0 ? k.p0_after : k.p0_before;
    }
    const double dt = k.cfg.dt;
    const double t_first = -static_cast<double>(t0) * dt;
    for (std::uint64_t attempt = 1; attempt <= k.cfg.max_attempts; ++attempt) {
        const std::size_t pre_end = rejection ? m : t0;
        for (std::size_t i = 0; i <= pre_end; ++i) {
            s.p[i] = history_value(k, t_first + static_cast<double>(i) * dt);
            s.lag[i] = k.slope;
        }
        if (rejection) {
            const double past = integrate(k, s, noise, m, t0);
            if (!hypothesis(k, s, m) || (k.past_bound > 0.0 && !(past < k.past_bound))) {
                continue;
            }
        }
        integrate(k, s, noise, t0, last);
        return {attempt, event(k, s, t0)};
    }
    std::ostringstream msg;
    msg << "replicate " << index << ": no history satisfying the " << to_string(k.scenario) << " hypothesis in "
        << k.cfg.max_attempts << " attempts";
    throw Error(ErrorCode::HypothesisUnsatisfiable, msg.str());
}

Kernel make_kernel(McScenario scenario, const ModelParams& params, const ResponseSpec& spec, const RootSet& roots,
                   const Scales& scales, const McConfig& cfg, double jump) {
    params.validate();
    spec.validate();
    cfg.validate();
    Kernel k{scenario, params, spec, roots, scales, cfg};
    k.m = static_cast<std::size_t>(std::llround(1.0 / cfg.dt));
    k.p0_after = scenario == McScenario::SmallJump || scenario == McScenario::LargeJump ? jump : 0.0;
    switch (start_of(scenario)) {
        case Start::MeanReversion:
            break;
        case Start::Bubble:
            k.slope = roots.x6;
            k.level = cfg.bubble_start_offset;
            if (scenario == McScenario::BubbleStability) {
                k.past_bound = scales.c_b * scales.delta_b / 4.0;
            }
            if (!(k.slope > scales.a_b) || !(k.level - k.slope > 0.0)) {
                throw Error(ErrorCode::HypothesisUnsatisfiable, "bubble start needs slope > a_b and P > P0");
            }
            break;
        case Start::Collapse:
            k.slope = roots.x1;
            k.level = cfg.collapse_start_offset;
            k.past_bound = scales.c_c * scales.delta_c / 4.0;
            if (!(k.slope < scales.a_c) || !(k.level > 0.0)) {
                throw Error(ErrorCode::HypothesisUnsatisfiable,
                            "collapse start needs slope < a_c and P > P0; raise collapse_start_offset");
            }
            break;
    }
    return k;
}

double stability_delta(RegimeLabel regime, const Scales& scales) {
    switch (regime) {
        case RegimeLabel::MeanReversion: return scales.delta_m;
        case RegimeLabel::Bubble: return scales.delta_b;
        case RegimeLabel::Collapse: return scales.delta_c;
        case RegimeLabel::Transitory: break;
    }
    throw Error(ErrorCode::ConfigInvalid, "stability is defined for MeanReversion, Bubble and Collapse only");
}

}  // namespace

void McConfig::validate() const {
    if (replicates < 100) {
        throw Error(ErrorCode::ConfigInvalid, "at least 100 replicates are required");
    }
    SimConfig probe;
    probe.dt = dt;
    probe.horizon = 1.0;
    probe.validate();
    if (!(K > 0.0)) {
        throw Error(ErrorCode::ConfigInvalid, "K must be positive");
    }
    if (max_attempts == 0) {
        throw Error(ErrorCode::ConfigInvalid, "max_attempts must be positive");
    }
}

std::string_view to_string(McScenario scenario) {
    switch (scenario) {
        case McScenario::MeanReversionStability: return "mean-reversion-stability";
        case McScenario::BubbleStability: return "bubble-stability";
        case McScenario::CollapseStability: return "collapse-stability";
        case McScenario::Ignition: return "ignition";
        case McScenario::CollapseTransition: return "collapse-transition";
        case McScenario::SmallJump: return "small-jump";
        case McScenario::LargeJump: return "large-jump";
        case McScenario::Corridor: return "corridor";
    }
    return "unknown";
}

std::string_view to_string(BoundFormula formula) {
    switch (formula) {
        case BoundFormula::StabilityPhi: return "StabilityPhi";
        case BoundFormula::IgnitionP0: return "IgnitionP0";
        case BoundFormula::CollapseBound: return "CollapseBound";
        case BoundFormula::GirsanovCorridor: return "GirsanovCorridor";
    }
    return "Unknown";
}

McEstimate make_estimate(std::uint64_t successes, std::uint64_t n, std::string scenario) {
    McEstimate e;
    e.n = n;
    e.successes = successes;
    e.p_hat = n == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(n);
    const WilsonInterval ci = wilson_interval(successes, n);
    e.ci_lo = ci.lo;
    e.ci_hi = ci.hi;
    e.ci_halfwidth = (ci.hi - ci.lo) / 2.0;
    e.scenario = std::move(scenario);
    return e;
}

BoundReport make_report(McEstimate empirical, double bound, BoundFormula formula, double K, double sigma,
                        std::string note) {
    BoundReport r;
    r.dominates = empirical.p_hat - empirical.ci_halfwidth >= bound;
    r.empirical = std::move(empirical);
    r.analytic_bound = bound;
    r.formula = formula;
    r.K = K;
    r.sigma = sigma;
    r.note = std::move(note);
    return r;
}

double girsanov_lower_bound(double c, double b, double t) noexcept {
    return std::exp(-c * b - c * c * t / 2.0) * (2.0 * normal_cdf(b / std::sqrt(t)) - 1.0);
}

std::vector<McEstimate> empirical_corridor_grid(const std::vector<double>& cs, const std::vector<double>& bs,
                                                double t, std::uint64_t n_paths, double dt, std::uint64_t seed,
                                                unsigned threads) {
    if (n_paths < 1000) {
        throw Error(ErrorCode::ConfigInvalid, "corridor estimation needs at least 1000 paths");
    }
    if (!(t > 0.0) || !(dt > 0.0) || dt > 1e-3 * t * (1.0 + 1e-12)) {
        throw Error(ErrorCode::ConfigInvalid, "corridor estimation needs t > 0 and 0 < dt <= 1e-3 t");
    }
    if (cs.empty() || bs.empty()) {
        throw Error(ErrorCode::ConfigInvalid, "empty corridor grid");
    }
    const auto steps = static_cast<std::size_t>(std::llround(t / dt));
    const double step_dt = t / static_cast<double>(steps);
    const double sd = std::sqrt(step_dt);
    const std::size_t nc = cs.size(), nb = bs.size();
    const double b_max = *std::max_element(bs.begin(), bs.end());

    std::vector<std::vector<std::uint64_t>> counts(resolve_threads(threads),
                                                   std::vector<std::uint64_t>(nc * nb, 0));
    parallel_chunks(n_paths, threads, [&](unsigned worker, std::uint64_t begin, std::uint64_t end) {
        std::vector<double> max_dev(nc);
        std::vector<double> z(1024);
        auto& local = counts[worker];
        for (std::uint64_t path = begin; path < end; ++path) {
            NoiseSource noise(NoiseSpec{NoiseFamily::Gaussian, seed, path});
            std::fill(max_dev.begin(), max_dev.end(), 0.0);
            double w = 0.0;
            std::size_t alive = nc;
            for (std::size_t k = 0; k < steps && alive > 0;) {
                const std::size_t batch = std::min<std::size_t>(z.size(), steps - k);
                noise.fill(std::span<double>(z).subspan(0, batch));
                for (std::size_t j = 0; j < batch && alive > 0; ++j, ++k) {
                    w += sd * z[j];
                    const double s = static_cast<double>(k + 1) * step_dt;
                    alive = 0;
                    for (std::size_t ic = 0; ic < nc; ++ic) {
                        max_dev[ic] = std::max(max_dev[ic], std::abs(w - cs[ic] * s));
                        alive += max_dev[ic] <= b_max ? 1 : 0;
                    }
                }
            }
            for (std::size_t ic = 0; ic < nc; ++ic) {
                for (std::size_t ib = 0; ib < nb; ++ib) {
                    local[ic * nb + ib] += max_dev[ic] <= bs[ib] ? 1 : 0;
                }
            }
        }
    });

    std::vector<McEstimate> out;
    out.reserve(nc * nb);
    for (std::size_t i = 0; i < nc * nb; ++i) {
        std::uint64_t total = 0;
        for (const auto& local : counts) {
            total += local[i];
        }
        std::ostringstream tag;
        tag << "corridor(c=" << cs[i / nb] << ",b=" << bs[i % nb] << ",t=" << t << ")";
        McEstimate e = make_estimate(total, n_paths, tag.str());
        e.note = "maximum monitored on a grid of step dt; excursions between grid points are missed, so p_hat "
                 "is biased upward";
        out.push_back(std::move(e));
    }
    return out;
}

McEstimate empirical_corridor_probability(double c, double b, double t, std::uint64_t n_paths, double dt,
                                          std::uint64_t seed, unsigned threads) {
    return empirical_corridor_grid({c}, {b}, t, n_paths, dt, seed, threads).front();
}

double ignition_lower_bound(const ModelParams& params, const Scales& scales) {
    const double sigma = params.sigma;
    if (sigma == 0.0) {
        throw Error(ErrorCode::DegenerateSigma, "ignition bound needs sigma > 0");
    }
    const double cbdb = scales.c_b * scales.delta_b;
    const double drift = scales.a_b + 2.0 * params.mu + scales.delta_m + cbdb;
    return std::exp(-drift * drift / (sigma * sigma)) *
           (2.0 * normal_cdf(std::min(scales.delta_m, cbdb) / (4.0 * sigma)) - 1.0) *
           (2.0 * normal_cdf(cbdb / (8.0 * sigma)) - 1.0);
}

double collapse_lower_bound(const ModelParams& params, const Scales& scales) {
    const double sigma = params.sigma;
    if (sigma == 0.0) {
        throw Error(ErrorCode::DegenerateSigma, "collapse bound needs sigma > 0");
    }
    const double cbdb = scales.c_b * scales.delta_b;
    const double ccdc = scales.c_c * scales.delta_c;
    const double drift = params.nu - scales.a_c + ccdc;
    return std::exp(-drift * drift / (sigma * sigma)) * (2.0 * normal_cdf(ccdc / (8.0 * sigma)) - 1.0) *
           (2.0 * normal_cdf(std::min(scales.delta_m, cbdb) / (4.0 * sigma)) - 1.0);
}

McEstimate estimate_scenario(McScenario scenario, const ModelParams& params, const ResponseSpec& spec,
                             const RootSet& roots, const Scales& scales, const McConfig& cfg, double jump) {
    if (scenario == McScenario::Corridor) {
        throw Error(ErrorCode::ConfigInvalid, "use empirical_corridor_probability for corridor estimates");
    }
    const Kernel kernel = make_kernel(scenario, params, spec, roots, scales, cfg, jump);
    const std::size_t length = (kernel.cfg.history == HistoryMode::Rejection ? 2 : 1) * kernel.m +
                               units_after(scenario) * kernel.m + 1;
    const unsigned workers = resolve_threads(cfg.threads);
    std::vector<std::uint64_t> successes(workers, 0), attempts(workers, 0);
    parallel_chunks(cfg.replicates, cfg.threads, [&](unsigned worker, std::uint64_t begin, std::uint64_t end) {
        Scratch s;
        s.p.resize(length);
        s.p0.resize(length);
        s.lag.resize(length);
        s.z.resize(kernel.m * 2);
        for (std::uint64_t r = begin; r < end; ++r) {
            const auto [used, ok] = run_replicate(kernel, s, r);
            attempts[worker] += used;
            successes[worker] += ok ? 1 : 0;
        }
    });
    std::uint64_t total_successes = 0, total_attempts = 0;
    for (unsigned i = 0; i < workers; ++i) {
        total_successes += successes[i];
        total_attempts += attempts[i];
    }
    std::ostringstream tag;
    tag << to_string(scenario) << "(sigma=" << params.sigma << ")";
    McEstimate e = make_estimate(total_successes, cfg.replicates, tag.str());
    e.acceptance_rate = static_cast<double>(cfg.replicates) / static_cast<double>(total_attempts);
    if (cfg.history == HistoryMode::Deterministic) {
        e.note = "noise-free history on [t0-1, t0]";
    } else {
        std::ostringstream note;
        note << "rejection-sampled history, acceptance rate " << e.acceptance_rate;
        e.note = note.str();
    }
    return e;
}

BoundReport estimate_regime_stability(RegimeLabel regime, const ModelParams& params, const ResponseSpec& spec,
                                      const RootSet& roots, const Scales& scales, const McConfig& cfg) {
    const double delta = stability_delta(regime, scales);
    const McScenario scenario = regime == RegimeLabel::MeanReversion ? McScenario::MeanReversionStability
                                : regime == RegimeLabel::Bubble      ? McScenario::BubbleStability
                                                                     : McScenario::CollapseStability;
    McEstimate e = estimate_scenario(scenario, params, spec, roots, scales, cfg);
    return make_report(std::move(e), stability_bound(delta, params.sigma, cfg.K), BoundFormula::StabilityPhi, cfg.K,
                       params.sigma);
}

BoundReport estimate_ignition_probability(const ModelParams& params, const ResponseSpec& spec,
                                          const RootSet& roots, const Scales& scales, const McConfig& cfg) {
    McEstimate e = estimate_scenario(McScenario::Ignition, params, spec, roots, scales, cfg);
    if (params.sigma == 0.0) {
        return make_report(std::move(e), 0.0, BoundFormula::IgnitionP0, cfg.K, 0.0,
                           "sigma = 0: bound reported as its limit 0");
    }
    return make_report(std::move(e), ignition_lower_bound(params, scales), BoundFormula::IgnitionP0, cfg.K,
                       params.sigma);
}

BoundReport estimate_collapse_probability(const ModelParams& params, const ResponseSpec& spec,
                                          const RootSet& roots, const Scales& scales, const McConfig& cfg) {
    McEstimate e = estimate_scenario(McScenario::CollapseTransition, params, spec, roots, scales, cfg);
    if (params.sigma == 0.0) {
        return make_report(std::move(e), 0.0, BoundFormula::CollapseBound, cfg.K, 0.0,
                           "sigma = 0: bound reported as its limit 0");
    }
    return make_report(std::move(e), collapse_lower_bound(params, scales), BoundFormula::CollapseBound, cfg.K,
                       params.sigma);
}

double large_jump_threshold(const ModelParams& params, const Scales& scales) noexcept {
    return (2.0 * scales.a_b + 3.0 * scales.delta_m) / std::min(params.mu, 1.0);
}

BoundReport estimate_random_jump_ignition(const ModelParams& params, const ResponseSpec& spec,
                                          const RootSet& roots, const Scales& scales, double jump_size,
                                          const McConfig& cfg, JumpMode mode) {
    const double threshold = large_jump_threshold(params, scales);
    if (mode == JumpMode::Auto) {
        mode = jump_size >= threshold ? JumpMode::Large : JumpMode::Small;
    }
    std::ostringstream note;
    if (mode == JumpMode::Small) {
        McEstimate e = estimate_scenario(McScenario::SmallJump, params, spec, roots, scales, cfg, jump_size);
        if (!(jump_size < scales.delta_m / 4.0)) {
            note << "jump " << jump_size << " is not below delta_m/4 = " << scales.delta_m / 4.0
                 << "; the small-jump bound is not licensed";
        }
        return make_report(std::move(e), stability_bound(scales.delta_m, params.sigma, cfg.K),
                           BoundFormula::StabilityPhi, cfg.K, params.sigma, note.str());
    }
    McEstimate e = estimate_scenario(McScenario::LargeJump, params, spec, roots, scales, cfg, jump_size);
    if (jump_size < threshold) {
        note << "jump " << jump_size << " is below the large-jump threshold " << threshold
             << "; the bound is not licensed";
    }
    const double delta = std::min(scales.delta_m, scales.c_b * scales.delta_b);
    return make_report(std::move(e), stability_bound(delta, params.sigma, cfg.K), BoundFormula::StabilityPhi, cfg.K,
                       params.sigma, note.str());
}

}  // namespace bubble
