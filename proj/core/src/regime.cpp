#include "bubble/regime.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bubble/error.hpp"

namespace bubble {

namespace {

constexpr double kConsistencyTol = 1e-6;

bool close(double a, double b) noexcept { return std::abs(a - b) <= kConsistencyTol * (1.0 + std::abs(b)); }

void check_consistency(const Trajectory& traj, const RootSet& roots, const Scales& scales) {
    const ModelParams& prm = traj.params;
    const ResponseSpec& spec = traj.spec;
    const bool ordered = roots.x1 < roots.x2 && roots.x2 < roots.x3 && roots.x3 < 0.0 && 0.0 < roots.x4 &&
                         roots.x4 < roots.x5 && roots.x5 < roots.x6;
    const bool residuals = std::abs(balance_residual(prm, spec, roots.x1, prm.mu)) < kConsistencyTol &&
                           std::abs(balance_residual(prm, spec, roots.x5, prm.mu)) < kConsistencyTol &&
                           std::abs(balance_residual(prm, spec, roots.x6, prm.mu)) < kConsistencyTol &&
                           std::abs(balance_residual(prm, spec, roots.x3, 0.0)) < kConsistencyTol;
    const bool scales_match = close(scales.delta_b, (roots.x6 - roots.x5) / 2.0) &&
                              close(scales.delta_c, (roots.x3 - roots.x2) / 2.0) &&
                              close(scales.a_b, roots.x5 + scales.delta_b / 2.0) &&
                              close(scales.a_c, roots.x3 - scales.delta_c / 2.0) && scales.delta_m > 0.0;
    if (!ordered || !residuals || !scales_match) {
        throw Error(ErrorCode::MismatchedScales, "roots/scales do not belong to the trajectory parameters");
    }
    if (traj.size() < traj.samples_per_unit() + 1) {
        throw Error(ErrorCode::MismatchedScales, "trajectory shorter than one delay unit");
    }
}

template <class T>
std::span<const T> window(const std::vector<T>& v, std::size_t start, std::size_t len) {
    return std::span<const T>(v).subspan(start, len);
}

}  // namespace

std::string_view to_string(RegimeLabel label) {
    switch (label) {
        case RegimeLabel::MeanReversion: return "MeanReversion";
        case RegimeLabel::Bubble: return "Bubble";
        case RegimeLabel::Collapse: return "Collapse";
        case RegimeLabel::Transitory: return "Transitory";
    }
    return "Unknown";
}

std::string_view to_string(JumpOutcome outcome) {
    return outcome == JumpOutcome::Ignition ? "Ignition" : "NoIgnition";
}

bool in_corridor(std::span<const double> p, std::span<const double> p0, double delta_m) noexcept {
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(std::abs(p[i] - p0[i]) < delta_m)) {
            return false;
        }
    }
    return true;
}

bool lag_above(std::span<const double> lag_diff, double threshold) noexcept {
    return std::all_of(lag_diff.begin(), lag_diff.end(), [&](double v) { return v > threshold; });
}

bool lag_below(std::span<const double> lag_diff, double threshold) noexcept {
    return std::all_of(lag_diff.begin(), lag_diff.end(), [&](double v) { return v < threshold; });
}

bool above_fundamental(std::span<const double> p, std::span<const double> p0) noexcept {
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > p0[i])) {
            return false;
        }
    }
    return true;
}

RegimeLabel label_window(std::span<const double> p, std::span<const double> p0, std::span<const double> lag_diff,
                         const RootSet& roots, const Scales& scales) noexcept {
    if (in_corridor(p, p0, scales.delta_m)) {
        return RegimeLabel::MeanReversion;
    }
    if (lag_above(lag_diff, roots.x5)) {
        return RegimeLabel::Bubble;
    }
    if (lag_below(lag_diff, roots.x3) && above_fundamental(p, p0)) {
        return RegimeLabel::Collapse;
    }
    return RegimeLabel::Transitory;
}

SegmentationReport classify_segments(const Trajectory& traj, const RootSet& roots, const Scales& scales) {
    check_consistency(traj, roots, scales);
    const std::size_t spu = traj.samples_per_unit();
    const std::size_t windows = (traj.size() - 1) / spu;

    SegmentationReport report;
    report.window_labels.reserve(windows);
    for (std::size_t k = 0; k < windows; ++k) {
        const std::size_t start = k * spu;
        report.window_labels.push_back(label_window(window(traj.p, start, spu + 1), window(traj.p0, start, spu + 1),
                                                    window(traj.lag_diff, start, spu + 1), roots, scales));
    }

    const auto& labels = report.window_labels;
    for (std::size_t k = 0; k < windows; ++k) {
        if (report.segments.empty() || report.segments.back().label != labels[k]) {
            report.segments.push_back({static_cast<double>(k), static_cast<double>(k + 1), labels[k]});
        } else {
            report.segments.back().t_end = static_cast<double>(k + 1);
        }
    }

    for (std::size_t k = 1; k < windows; ++k) {
        if (labels[k] == RegimeLabel::Bubble && labels[k - 1] != RegimeLabel::Bubble) {
            report.ignition_events.push_back(static_cast<double>(k));
        }
    }
    for (std::size_t k = 0; k + 1 < windows; ++k) {
        if (labels[k] != RegimeLabel::Bubble || labels[k + 1] == RegimeLabel::Bubble) {
            continue;
        }
        for (std::size_t g = 1; g <= kCollapseGapWindows + 1 && k + g < windows; ++g) {
            const RegimeLabel next = labels[k + g];
            if (next == RegimeLabel::Collapse) {
                report.collapse_events.push_back(static_cast<double>(k + g));
                break;
            }
            if (next != RegimeLabel::Transitory) {
                break;
            }
        }
    }
    return report;
}

std::optional<double> detect_ignition(const Trajectory& traj, double a_b) {
    const std::size_t spu = traj.samples_per_unit();
    std::size_t run = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        run = traj.lag_diff[i] > a_b ? run + 1 : 0;
        if (run == spu + 1) {
            return traj.times[i + 1 - run];
        }
    }
    return std::nullopt;
}

double asymptotic_slope(const Trajectory& traj, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0) || traj.size() < 2) {
        throw Error(ErrorCode::InsufficientTail, "tail_fraction must lie in (0, 1) on a non-trivial trajectory");
    }
    const double t_end = traj.times.back();
    const double t_from = t_end - tail_fraction * (t_end - traj.times.front());
    const auto first = std::lower_bound(traj.times.begin(), traj.times.end(), t_from) - traj.times.begin();
    const auto n = static_cast<std::size_t>(traj.size() - static_cast<std::size_t>(first));
    if (n < 2) {
        throw Error(ErrorCode::InsufficientTail, "fewer than two samples in the tail");
    }
    double t_mean = 0.0, p_mean = 0.0;
    for (std::size_t i = static_cast<std::size_t>(first); i < traj.size(); ++i) {
        t_mean += traj.times[i];
        p_mean += traj.p[i];
    }
    t_mean /= static_cast<double>(n);
    p_mean /= static_cast<double>(n);
    double stt = 0.0, stp = 0.0;
    for (std::size_t i = static_cast<std::size_t>(first); i < traj.size(); ++i) {
        const double dt = traj.times[i] - t_mean;
        stt += dt * dt;
        stp += dt * (traj.p[i] - p_mean);
    }
    return stp / stt;
}

JumpOutcome verify_deterministic_jump(const ModelParams& params, const ResponseSpec& spec, const RootSet& roots,
                                      const Scales& scales, double jump, double dt) {
    ModelParams quiet = params;
    quiet.sigma = 0.0;
    constexpr double t0 = 1.0;
    SimConfig cfg;
    cfg.dt = dt;
    cfg.horizon = t0 + 3.0;
    cfg.history = ConstantHistory{0.0};
    const Trajectory traj = simulate(quiet, spec, JumpFundamental{0.0, jump, t0}, cfg);

    const std::size_t spu = traj.samples_per_unit();
    const std::size_t i0 = static_cast<std::size_t>(std::llround(t0)) * spu;
    bool corridor = true;
    for (std::size_t i = i0; i <= i0 + spu; ++i) {
        const double gap = traj.p[i] - jump;
        corridor = corridor && gap < scales.delta_m / 2.0 && gap > -scales.delta_m;
    }
    const bool ignited = lag_above(window(traj.lag_diff, i0 + spu, spu + 1), roots.x5);
    if (ignited) {
        return JumpOutcome::Ignition;
    }
    if (corridor) {
        return JumpOutcome::NoIgnition;
    }
    std::ostringstream msg;
    msg << "jump " << jump << " neither stays in the corridor nor ignites a bubble";
    throw Error(ErrorCode::InconclusiveRegime, msg.str());
}

std::vector<TheoremCheck> deterministic_suite(const ModelParams& params, const ResponseSpec& spec,
                                              const RootSet& roots, const Scales& scales, double dt) {
    ModelParams quiet = params;
    quiet.sigma = 0.0;
    const ConstantFundamental flat{0.0};
    std::vector<TheoremCheck> out;

    {
        TheoremCheck check{"mean-reversion corridor persistence", true, ""};
        const double dm = scales.delta_m;
        const std::vector<InitialHistory> histories = {ConstantHistory{0.9 * dm}, ConstantHistory{-0.9 * dm},
                                                       LinearHistory{0.9 * dm, 1.8 * dm},
                                                       LinearHistory{-0.9 * dm, -1.8 * dm}};
        double worst = 0.0;
        for (const auto& h : histories) {
            SimConfig cfg;
            cfg.dt = dt;
            cfg.horizon = 50.0;
            cfg.history = h;
            const Trajectory traj = simulate(quiet, spec, flat, cfg);
            for (std::size_t i = 0; i < traj.size(); ++i) {
                worst = std::max(worst, std::abs(traj.p[i]));
            }
            check.passed = check.passed && in_corridor(traj.p, traj.p0, dm);
        }
        std::ostringstream detail;
        detail << "max |P - P0| = " << worst << " vs delta_m = " << dm << " over horizon 50";
        check.detail = detail.str();
        out.push_back(check);
    }

    {
        TheoremCheck check{"bubble persistence and slope -> x6", false, ""};
        SimConfig cfg;
        cfg.dt = dt;
        cfg.horizon = 30.0;
        const double slope = roots.x5 + scales.delta_b * 0.8;
        cfg.history = LinearHistory{0.0, slope};
        const Trajectory traj = simulate(quiet, spec, flat, cfg);
        const bool persists = lag_above(traj.lag_diff, roots.x5);
        const double s = asymptotic_slope(traj, 0.2);
        check.passed = persists && std::abs(s - roots.x6) < 1e-3;
        std::ostringstream detail;
        detail << "history slope " << slope << ", min lag_diff > x5: " << (persists ? "yes" : "no")
               << ", tail slope " << s << " vs x6 = " << roots.x6;
        check.detail = detail.str();
        out.push_back(check);
    }

    {
        TheoremCheck check{"collapse persistence and deceleration", false, ""};
        SimConfig cfg;
        cfg.dt = dt;
        cfg.horizon = 30.0;
        const double d0 = 0.5 * (roots.x2 + roots.x3);
        const double start = 10.0 * std::abs(roots.x1);
        cfg.history = LinearHistory{start, d0};
        const Trajectory traj = simulate(quiet, spec, flat, cfg);
        const std::size_t spu = traj.samples_per_unit();
        std::size_t end = 0;
        while (end < traj.size() && traj.p[end] > traj.p0[end]) {
            ++end;
        }
        const bool below = lag_below(window(traj.lag_diff, 0, end), roots.x3);
        bool decelerates = true;
        int applicable = 0;
        for (std::size_t k = 0; (k + 2) * spu < end; ++k) {
            const auto w0 = window(traj.lag_diff, k * spu, spu + 1);
            const auto w1 = window(traj.lag_diff, (k + 1) * spu, spu + 1);
            const double m0 = *std::max_element(w0.begin(), w0.end());
            const double m1 = *std::max_element(w1.begin(), w1.end());
            if (m0 > roots.x2 && m0 < roots.x3) {
                ++applicable;
                decelerates = decelerates && m1 < m0;
            }
        }
        check.passed = end > 0 && below && decelerates && applicable > 0;
        std::ostringstream detail;
        detail << "P > P0 until t = " << traj.times[std::min(end, traj.size() - 1)]
               << ", lag_diff < x3 throughout: " << (below ? "yes" : "no") << ", deceleration on " << applicable
               << " window pair(s): " << (decelerates ? "yes" : "no");
        check.detail = detail.str();
        out.push_back(check);
    }

    auto jump_check = [&](const std::string& name, double jump, JumpOutcome expected) {
        TheoremCheck check{name, false, ""};
        std::ostringstream detail;
        detail << "jump " << jump << ": ";
        try {
            const JumpOutcome got = verify_deterministic_jump(quiet, spec, roots, scales, jump, dt);
            check.passed = got == expected;
            detail << to_string(got);
        } catch (const Error& e) {
            detail << e.what();
        }
        check.detail = detail.str();
        out.push_back(check);
    };
    jump_check("small jump keeps mean reversion", scales.delta_m / 4.0, JumpOutcome::NoIgnition);
    jump_check("large jump ignites", roots.x5 + roots.x5 / params.mu + scales.delta_m, JumpOutcome::Ignition);
    return out;
}

std::size_t longest_run(const std::vector<RegimeLabel>& labels, RegimeLabel label) noexcept {
    std::size_t best = 0, run = 0;
    for (RegimeLabel l : labels) {
        run = l == label ? run + 1 : 0;
        best = std::max(best, run);
    }
    return best;
}

bool has_sustained_bubble(const SegmentationReport& report, std::size_t min_windows) noexcept {
    return longest_run(report.window_labels, RegimeLabel::Bubble) >= min_windows;
}

std::vector<double> serial_bubble_ignitions(const Trajectory& traj, const SegmentationReport& report,
                                            double within) {
    std::vector<double> out;
    for (double tc : report.collapse_events) {
        auto i = static_cast<std::size_t>(std::lower_bound(traj.times.begin(), traj.times.end(), tc) -
                                          traj.times.begin());
        while (i < traj.size() && traj.p[i] > traj.p0[i]) {
            ++i;
        }
        while (i < traj.size() && traj.p[i] <= traj.p0[i]) {
            ++i;
        }
        if (i >= traj.size()) {
            continue;
        }
        const double r = traj.times[i];
        for (double tg : report.ignition_events) {
            if (tg >= std::floor(r) && tg <= r + within) {
                if (out.empty() || out.back() != tg) {
                    out.push_back(tg);
                }
                break;
            }
        }
    }
    return out;
}

double unit_return_volatility(const Trajectory& traj) {
    const std::size_t spu = traj.samples_per_unit();
    std::vector<double> returns;
    for (std::size_t i = spu; i < traj.size(); i += spu) {
        returns.push_back(traj.p[i] - traj.p[i - spu]);
    }
    if (returns.size() < 2) {
        return 0.0;
    }
    double mean = 0.0;
    for (double r : returns) {
        mean += r;
    }
    mean /= static_cast<double>(returns.size());
    double ss = 0.0;
    for (double r : returns) {
        ss += (r - mean) * (r - mean);
    }
    return std::sqrt(ss / static_cast<double>(returns.size() - 1));
}

}  // namespace bubble
