#include "bubble/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bubble/error.hpp"
#include "bubble/rng.hpp"

namespace bubble {

namespace {

double scale_of(const ResponseSpec& spec) noexcept { return spec.normalized ? 2.0 / std::numbers::pi : 1.0; }

// x^(2n+1) by repeated multiplication; exactly odd in x.
inline double odd_power(double x, int n) noexcept {
    const double x2 = x * x;
    double result = x;
    for (int i = 0; i < n; ++i) {
        result *= x2;
    }
    return result;
}

// Separate key space for the fundamental's own random walk so it never
// shares a sequence with price noise even when the seeds coincide.
constexpr std::uint64_t kFundamentalStream = 0xF0000000'00000000ull;

}  // namespace

void ModelParams::validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw Error(ErrorCode::ConfigInvalid, "mu must be a finite positive number");
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorCode::ConfigInvalid, "sigma must be finite and non-negative");
    }
    if (!(nu >= 0.0) || !std::isfinite(nu)) {
        throw Error(ErrorCode::ConfigInvalid, "nu must be finite and non-negative");
    }
}

void ResponseSpec::validate() const {
    if (!(d > 0.0) || !std::isfinite(d)) {
        throw Error(ErrorCode::ConfigInvalid, "response d must be a finite positive number");
    }
    if (n < 0 || n > 16) {
        throw Error(ErrorCode::ConfigInvalid, "response n must be in [0, 16]");
    }
}

double ResponseSpec::saturation() const noexcept { return normalized ? 1.0 : std::numbers::pi / 2.0; }

double ResponseSpec::slope_at_origin() const noexcept { return n == 0 ? d * scale_of(*this) : 0.0; }

double response_value(const ResponseSpec& spec, double x) noexcept {
    return scale_of(spec) * std::atan(spec.d * odd_power(x, spec.n));
}

double response_derivative(const ResponseSpec& spec, double x) noexcept {
    const int power = 2 * spec.n + 1;
    if (x == 0.0) {
        return spec.slope_at_origin();
    }
    // S'(x) = power * u / (x (1 + u^2)) with u = d x^power; this form stays
    // finite where x^(2 power) alone would overflow.
    const double u = spec.d * odd_power(x, spec.n);
    if (!std::isfinite(u)) {
        return 0.0;
    }
    return scale_of(spec) * power * (u / x) / (1.0 + u * u);
}

double response_inflection_point(const ResponseSpec& spec) noexcept {
    if (spec.n == 0) {
        return 0.0;
    }
    // S'' vanishes where u^2 = (m-1)/(m+1), u = d x^m, m = 2n+1.
    const double m = 2.0 * spec.n + 1.0;
    const double u = std::sqrt((m - 1.0) / (m + 1.0));
    return std::pow(u / spec.d, 1.0 / m);
}

DriftValue fundamental_term(const ModelParams& params, double p, double p0) noexcept {
    double exponent = p0 - p;
    bool saturated = false;
    if (exponent > kExpSaturation) {
        exponent = kExpSaturation;
        saturated = true;
    }
    return {-params.mu * (1.0 - std::exp(exponent)), saturated};
}

DriftValue total_drift(const ModelParams& params, const ResponseSpec& spec, double p, double p0,
                       double lag_diff) noexcept {
    DriftValue f = fundamental_term(params, p, p0);
    f.value += params.nu * response_value(spec, lag_diff);
    return f;
}

double fundamental_initial_value(const FundamentalSchedule& schedule) noexcept {
    struct Visitor {
        double operator()(const ConstantFundamental& c) const { return c.p0; }
        double operator()(const JumpFundamental& j) const { return j.t_jump <= 0.0 ? j.p_plus : j.p_minus; }
        double operator()(const RandomWalkFundamental& r) const { return r.p_start; }
    };
    return std::visit(Visitor{}, schedule);
}

std::vector<double> sample_fundamental(const FundamentalSchedule& schedule, double dt, std::size_t steps) {
    std::vector<double> values(steps + 1);
    if (const auto* c = std::get_if<ConstantFundamental>(&schedule)) {
        std::fill(values.begin(), values.end(), c->p0);
    } else if (const auto* j = std::get_if<JumpFundamental>(&schedule)) {
        // First grid index whose time is >= t_jump; the tolerance absorbs
        // t_jump values that are grid points up to rounding.
        const double k_jump = std::ceil(j->t_jump / dt - 1e-9);
        for (std::size_t k = 0; k <= steps; ++k) {
            values[k] = static_cast<double>(k) >= k_jump ? j->p_plus : j->p_minus;
        }
    } else {
        const auto& r = std::get<RandomWalkFundamental>(schedule);
        NoiseSource source(NoiseSpec{NoiseFamily::Gaussian, r.seed, kFundamentalStream});
        const double step_vol = r.vol * std::sqrt(dt);
        values[0] = r.p_start;
        for (std::size_t k = 0; k < steps; ++k) {
            const double z = r.vol > 0.0 ? source.next() : 0.0;
            values[k + 1] = values[k] + r.drift * dt + step_vol * z;
        }
    }
    return values;
}

std::vector<std::string> validate_schedule(const FundamentalSchedule& schedule, const ModelParams& params,
                                           double horizon) {
    std::vector<std::string> warnings;
    if (const auto* j = std::get_if<JumpFundamental>(&schedule)) {
        if (!(j->t_jump >= 0.0 && j->t_jump <= horizon)) {
            throw Error(ErrorCode::ConfigInvalid, "jump time must lie within [0, horizon]");
        }
        if (!std::isfinite(j->p_minus) || !std::isfinite(j->p_plus)) {
            throw Error(ErrorCode::ConfigInvalid, "jump levels must be finite");
        }
    } else if (const auto* r = std::get_if<RandomWalkFundamental>(&schedule)) {
        if (!(r->vol >= 0.0) || !std::isfinite(r->vol) || !std::isfinite(r->drift)) {
            throw Error(ErrorCode::ConfigInvalid, "random-walk vol must be finite and non-negative");
        }
        if (r->vol > 0.0 && r->vol >= 0.5 * params.sigma) {
            std::ostringstream msg;
            msg << "fundamental random-walk vol " << r->vol << " is not well below sigma " << params.sigma;
            warnings.push_back(msg.str());
        }
    }
    return warnings;
}

}  // namespace bubble
