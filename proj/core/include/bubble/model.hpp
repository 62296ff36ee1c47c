#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace bubble {

/// Coefficients of the bubble equation
///
///   dP = -mu (1 - exp(P0 - P)) dt + sigma dB + nu S(P(t) - P(t-1)) dt
///
/// written for the log-price P. Time is measured in units of the delay,
/// which is therefore always 1.
struct ModelParams {
    double mu = 0.0;     ///< mean-reversion strength, 1/time
    double sigma = 0.0;  ///< noise amplitude, 1/sqrt(time)
    double nu = 0.0;     ///< speculative strength, 1/time

    static constexpr double delay = 1.0;

    /// Throws Error(ConfigInvalid) unless mu > 0, sigma >= 0, nu >= 0.
    void validate() const;

    bool operator==(const ModelParams&) const = default;
};

/// Social response S(x) = arctan(d x^(2n+1)), optionally scaled by 2/pi so
/// that S(x) -> 1.
struct ResponseSpec {
    double d = 1.0;
    int n = 1;
    bool normalized = false;

    void validate() const;

    /// Limit of S(x) as x -> +inf: pi/2 raw, 1 normalized.
    double saturation() const noexcept;

    /// S'(0). Zero for n >= 1, d (times 2/pi) for n = 0.
    double slope_at_origin() const noexcept;

    bool operator==(const ResponseSpec&) const = default;
};

double response_value(const ResponseSpec& spec, double x) noexcept;
double response_derivative(const ResponseSpec& spec, double x) noexcept;

/// Positive inflection point b of S (S'' > 0 on (0,b), < 0 beyond). Only
/// diagnostic; nothing downstream depends on it. Returns 0 for n = 0.
double response_inflection_point(const ResponseSpec& spec) noexcept;

/// Result of evaluating the mean-reversion term. `saturated` is set when
/// exp(p0 - p) had to be clamped at exp(700).
struct DriftValue {
    double value = 0.0;
    bool saturated = false;
};

inline constexpr double kExpSaturation = 700.0;

/// f(p, p0) = -mu (1 - exp(p0 - p)).
DriftValue fundamental_term(const ModelParams& params, double p, double p0) noexcept;

/// f(p, p0) + nu S(lag_diff), with lag_diff = P(t) - P(t-1).
DriftValue total_drift(const ModelParams& params, const ResponseSpec& spec, double p, double p0,
                       double lag_diff) noexcept;

// Fundamental schedule P0(t), all values in log-price units.

struct ConstantFundamental {
    double p0 = 0.0;
    bool operator==(const ConstantFundamental&) const = default;
};

/// P0 = p_minus before the jump, p_plus from the first grid point at or
/// after t_jump.
struct JumpFundamental {
    double p_minus = 0.0;
    double p_plus = 0.0;
    double t_jump = 0.0;
    bool operator==(const JumpFundamental&) const = default;
};

/// Random walk with drift; its own noise stream is keyed by `seed`.
struct RandomWalkFundamental {
    double p_start = 0.0;
    double drift = 0.0;  ///< per unit time
    double vol = 0.0;    ///< per sqrt(time)
    std::uint64_t seed = 0;
    bool operator==(const RandomWalkFundamental&) const = default;
};

using FundamentalSchedule = std::variant<ConstantFundamental, JumpFundamental, RandomWalkFundamental>;

/// Value of P0 for t <= 0 (used across the initial history).
double fundamental_initial_value(const FundamentalSchedule& schedule) noexcept;

/// P0 sampled at t_k = k dt for k = 0..steps.
std::vector<double> sample_fundamental(const FundamentalSchedule& schedule, double dt, std::size_t steps);

/// Rejects invalid schedules (jump outside [0, horizon], negative vol) and
/// returns soft warnings, e.g. a random-walk volatility not well below sigma.
std::vector<std::string> validate_schedule(const FundamentalSchedule& schedule, const ModelParams& params,
                                           double horizon);

}  // namespace bubble
