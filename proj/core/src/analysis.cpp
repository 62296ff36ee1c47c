#include "bubble/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bubble/stats.hpp"

namespace bubble {

namespace {

constexpr double kScanStep = 1e-3;
constexpr double kScanStart = 1e-9;
constexpr double kBracketWidth = 1e-12;
constexpr double kTangencyGap = 1e-6;
// A local extremum of g this close to zero is a double root up to rounding;
// two simple roots that near each other would sit about 1e-6 apart.
constexpr double kTangencyResidual = 1e-12;
constexpr int kDeltaMCandidates = 128;

template <class F>
double bisect(F&& g, double lo, double hi) {
    double glo = g(lo);
    for (int it = 0; it < 200 && hi - lo > kBracketWidth; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double gm = g(mid);
        if (gm == 0.0) {
            return mid;
        }
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Minimizes s * g on [a, b]; returns the argmin.
template <class F>
double golden_min(F&& g, double s, double a, double b) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = s * g(c);
    double fd = s * g(d);
    for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = s * g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = s * g(d);
        }
    }
    return 0.5 * (a + b);
}

template <class F>
void scan_half(F&& g, double direction, double limit, std::vector<double>& out) {
    const auto steps = static_cast<std::size_t>(std::ceil((limit - kScanStart) / kScanStep));
    std::vector<double> xs(steps + 1);
    std::vector<double> gs(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        xs[k] = direction * (kScanStart + static_cast<double>(k) * kScanStep);
        gs[k] = g(xs[k]);
    }
    auto ordered = [](double u, double v) { return std::pair{std::min(u, v), std::max(u, v)}; };
    for (std::size_t k = 0; k < steps; ++k) {
        if (gs[k] == 0.0) {
            out.push_back(xs[k]);
            continue;
        }
        if ((gs[k] < 0.0) != (gs[k + 1] < 0.0) && gs[k + 1] != 0.0) {
            const auto [lo, hi] = ordered(xs[k], xs[k + 1]);
            out.push_back(bisect(g, lo, hi));
        }
    }
    if (gs[steps] == 0.0) {
        out.push_back(xs[steps]);
    }
    // A pair of roots inside one or two cells leaves no sign change on the
    // grid but shows up as a local minimum of |g|.
    for (std::size_t k = 1; k < steps; ++k) {
        const double a = gs[k - 1], b = gs[k], c = gs[k + 1];
        if (a == 0.0 || b == 0.0 || c == 0.0) {
            continue;
        }
        if ((a < 0.0) != (b < 0.0) || (b < 0.0) != (c < 0.0)) {
            continue;
        }
        if (!(std::abs(b) <= std::abs(a) && std::abs(b) < std::abs(c))) {
            continue;
        }
        const double s = b > 0.0 ? 1.0 : -1.0;
        const auto [lo, hi] = ordered(xs[k - 1], xs[k + 1]);
        const double xm = golden_min(g, s, lo, hi);
        const double gm = g(xm);
        if (std::abs(gm) <= kTangencyResidual * (1.0 + std::abs(xm))) {
            out.push_back(xm);
            out.push_back(xm);
        } else if ((gm < 0.0) != (b < 0.0)) {
            out.push_back(bisect(g, lo, xm));
            out.push_back(bisect(g, xm, hi));
        }
    }
}

std::string describe(const std::vector<double>& roots) {
    std::ostringstream os;
    os.precision(10);
    os << '[';
    for (std::size_t i = 0; i < roots.size(); ++i) {
        os << (i ? ", " : "") << roots[i];
    }
    os << ']';
    return os.str();
}

struct Counts {
    std::vector<double> positive;
    std::vector<double> negative;
    bool tangency = false;
};

Counts split(const std::vector<double>& roots, bool tangency) {
    Counts c;
    c.tangency = tangency;
    for (double r : roots) {
        (r > 0.0 ? c.positive : c.negative).push_back(r);
    }
    return c;
}

AssumptionIIStatus classify(const Counts& a) {
    if (a.tangency) {
        return AssumptionIIStatus::DegenerateTangency;
    }
    if (a.positive.empty()) {
        return AssumptionIIStatus::NoPositiveRoots;
    }
    if (a.negative.size() == 3) {
        return AssumptionIIStatus::ThreeNegativeRoots;
    }
    if (a.positive.size() == 2 && a.negative.size() == 1) {
        return AssumptionIIStatus::Holds;
    }
    throw Error(ErrorCode::RootStructure, "unexpected root count for nu S(x) = x + mu: " +
                                              describe(a.negative) + " / " + describe(a.positive));
}

}  // namespace

std::string_view to_string(AssumptionIIStatus status) {
    switch (status) {
        case AssumptionIIStatus::Holds: return "Holds";
        case AssumptionIIStatus::NoPositiveRoots: return "NoPositiveRoots";
        case AssumptionIIStatus::DegenerateTangency: return "DegenerateTangency";
        case AssumptionIIStatus::ThreeNegativeRoots: return "ThreeNegativeRoots";
    }
    return "Unknown";
}

AssumptionIIViolated::AssumptionIIViolated(AssumptionIIStatus status, const std::string& message)
    : Error(ErrorCode::AssumptionIIViolated, message), status_(status) {}

double balance_residual(const ModelParams& params, const ResponseSpec& spec, double x, double shift) noexcept {
    return params.nu * response_value(spec, x) - x - shift;
}

std::vector<double> balance_roots(const ModelParams& params, const ResponseSpec& spec, double shift,
                                  bool* tangency) {
    const double limit = 4.0 * (spec.saturation() * params.nu + params.mu);
    auto g = [&](double x) { return balance_residual(params, spec, x, shift); };
    std::vector<double> raw;
    scan_half(g, 1.0, limit, raw);
    scan_half(g, -1.0, limit, raw);
    std::sort(raw.begin(), raw.end());

    std::vector<double> roots;
    bool touched = false;
    for (double r : raw) {
        if (!roots.empty() && r - roots.back() < kTangencyGap) {
            touched = true;
            roots.back() = 0.5 * (roots.back() + r);
            continue;
        }
        roots.push_back(r);
    }
    if (tangency != nullptr) {
        *tangency = touched;
    }
    return roots;
}

AssumptionIIStatus assumption_II_status(const ModelParams& params, const ResponseSpec& spec) {
    bool tangency = false;
    const auto roots = balance_roots(params, spec, params.mu, &tangency);
    return classify(split(roots, tangency));
}

RootSet solve_roots(const ModelParams& params, const ResponseSpec& spec) {
    params.validate();
    spec.validate();

    bool tangency = false;
    const auto a_roots = balance_roots(params, spec, params.mu, &tangency);
    const Counts a = split(a_roots, tangency);
    const AssumptionIIStatus status = classify(a);
    if (status != AssumptionIIStatus::Holds) {
        std::string message = "nu S(x) = x + mu has roots " + describe(a_roots) + " (" +
                              std::string(to_string(status)) + ")";
        if (status == AssumptionIIStatus::ThreeNegativeRoots) {
            message += "; non-panic collapse configuration, not analysed";
        }
        throw AssumptionIIViolated(status, message);
    }

    bool b_tangency = false;
    const Counts b = split(balance_roots(params, spec, 0.0, &b_tangency), b_tangency);
    if (b_tangency || b.positive.size() != 2 || b.negative.size() != 2) {
        throw Error(ErrorCode::RootStructure, "nu S(x) = x should have two roots on each half-line, got " +
                                                  describe(b.negative) + " / " + describe(b.positive));
    }

    RootSet r;
    r.x1 = a.negative[0];
    r.x5 = a.positive[0];
    r.x6 = a.positive[1];
    r.x2 = b.negative[0];
    r.x3 = b.negative[1];
    r.x4 = b.positive[0];
    r.x4_upper = b.positive[1];
    return r;
}

AssumptionReport verify_assumptions(const ModelParams& params, const ResponseSpec& spec, double threshold) {
    AssumptionReport report;
    report.assumption_I_ratio = params.nu * spec.slope_at_origin() / params.mu;
    report.assumption_I_holds = report.assumption_I_ratio < threshold;
    std::ostringstream details;
    details << "nu S'(0)/mu = " << report.assumption_I_ratio << " (threshold " << threshold << ")";
    try {
        report.assumption_II_status = assumption_II_status(params, spec);
    } catch (const Error& e) {
        report.assumption_II_status = AssumptionIIStatus::NoPositiveRoots;
        details << "; " << e.what();
    }
    details << "; assumption II: " << to_string(report.assumption_II_status);
    if (report.assumption_II_status == AssumptionIIStatus::ThreeNegativeRoots) {
        details << " (non-panic collapse configuration)";
    }
    report.details = details.str();
    return report;
}

bool corridor_holds(const ModelParams& params, const ResponseSpec& spec, double delta_m, double c_m, int points) {
    const double margin = c_m * params.mu * delta_m;
    const double lo = delta_m / 4.0;
    const double step = (delta_m - lo) / static_cast<double>(points - 1);
    for (int i = 0; i < points; ++i) {
        const double x = i + 1 == points ? delta_m : lo + step * i;
        const double up = -params.mu * (1.0 - std::exp(-x)) + params.nu * response_value(spec, x + delta_m);
        if (!(up < -margin)) {
            return false;
        }
        const double down = -params.mu * (1.0 - std::exp(x)) + params.nu * response_value(spec, -x - delta_m);
        if (!(down > margin)) {
            return false;
        }
    }
    return true;
}

double find_delta_m(const ModelParams& params, const ResponseSpec& spec, const RootSet& roots, double c_m) {
    if (!(c_m > 0.0)) {
        throw Error(ErrorCode::ConfigInvalid, "c_m must be positive");
    }
    const double hi = roots.x5;
    const double lo = 1e-4 * roots.x5;
    const double ratio = std::log(hi / lo) / (kDeltaMCandidates - 1);
    for (int i = kDeltaMCandidates - 1; i >= 0; --i) {
        const double candidate = i == kDeltaMCandidates - 1 ? hi : lo * std::exp(ratio * i);
        if (corridor_holds(params, spec, candidate, c_m)) {
            return candidate;
        }
    }
    std::ostringstream msg;
    msg << "no delta_m in [" << lo << ", " << hi << "] satisfies the corridor inequalities with c_m = " << c_m;
    throw Error(ErrorCode::NoCorridorFound, msg.str());
}

double find_delta_m(const ModelParams& params, const ResponseSpec& spec, double c_m) {
    return find_delta_m(params, spec, solve_roots(params, spec), c_m);
}

Scales derive_scales(const ModelParams& params, const ResponseSpec& spec, const RootSet& roots, double delta_m,
                     double c_m) {
    if (!(roots.x5 > delta_m)) {
        throw Error(ErrorCode::ScaleInconsistency, "x5 must exceed delta_m");
    }
    Scales s;
    s.delta_m = delta_m;
    s.c_m = c_m;
    s.delta_b = (roots.x6 - roots.x5) / 2.0;
    s.delta_c = (roots.x3 - roots.x2) / 2.0;
    s.a_b = roots.x5 + s.delta_b / 2.0;
    s.a_c = roots.x3 - s.delta_c / 2.0;
    s.c_b = (params.nu * response_value(spec, s.a_b) - params.mu - s.a_b) / s.delta_b;
    s.c_c = (s.a_c - params.nu * response_value(spec, s.a_c)) / s.delta_c;
    if (!(s.c_b > 0.0) || !(s.c_c > 0.0)) {
        throw Error(ErrorCode::ScaleInconsistency, "c_b and c_c must both be positive");
    }
    return s;
}

HeuristicRates heuristic_transition_rates(const ModelParams& params, const Scales& scales) noexcept {
    if (params.sigma == 0.0) {
        return {0.0, 0.0, true};
    }
    return {normal_sf((1.0 + params.mu) * scales.a_b / params.sigma), normal_sf(scales.delta_b / params.sigma),
            false};
}

Analysis analyze(const ModelParams& params, const ResponseSpec& spec, double c_m, double threshold) {
    Analysis out;
    out.assumptions = verify_assumptions(params, spec, threshold);
    out.roots = solve_roots(params, spec);
    const double delta_m = find_delta_m(params, spec, out.roots, c_m);
    out.scales = derive_scales(params, spec, out.roots, delta_m, c_m);
    return out;
}

}  // namespace bubble
