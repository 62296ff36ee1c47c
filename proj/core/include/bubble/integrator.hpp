#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "bubble/model.hpp"
#include "bubble/rng.hpp"

namespace bubble {

// Initial history on [-1, 0].

/// P(t) = p_init.
struct ConstantHistory {
    double p_init = 0.0;
    bool operator==(const ConstantHistory&) const = default;
};

/// P(t) = p_end + slope t, so P(0) = p_end and every unit-lag difference on
/// the history equals `slope`.
struct LinearHistory {
    double p_end = 0.0;
    double slope = 0.0;
    bool operator==(const LinearHistory&) const = default;
};

/// 1/dt + 1 values at t = -1, -1 + dt, ..., 0.
struct SampledHistory {
    std::vector<double> values;
    bool operator==(const SampledHistory&) const = default;
};

using InitialHistory = std::variant<ConstantHistory, LinearHistory, SampledHistory>;

inline constexpr double kDefaultDt = 1.0 / 256.0;

struct SimConfig {
    double dt = kDefaultDt;
    double horizon = 10.0;
    InitialHistory history = ConstantHistory{};
    NoiseSpec noise{};
    int record_stride = 1;

    /// Throws Error(ConfigInvalid): dt in (0, 1] with 1/dt integral,
    /// horizon >= 1 and a whole number of steps, stride >= 1 dividing 1/dt,
    /// sampled history of the right length.
    void validate() const;

    std::size_t steps_per_unit() const;
    std::size_t total_steps() const;

    bool operator==(const SimConfig&) const = default;
};

/// History values at t = -1 .. 0 on the dt grid.
std::vector<double> history_values(const InitialHistory& history, double dt);

/// A sampled path on [0, horizon]. All arrays have one entry per recorded
/// grid point. noise_increments[k] is the noise that produced p[k] (summed
/// over the stride), with noise_increments[0] = 0. lag_diff[k] = P(t_k) -
/// P(t_k - 1), using the history where t_k < 1.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> p;
    std::vector<double> p0;
    std::vector<double> lag_diff;
    std::vector<double> noise_increments;

    std::vector<double> history;  ///< full-resolution P on [-1, 0]
    double dt = kDefaultDt;
    int record_stride = 1;
    bool saturation_flag = false;
    std::uint64_t seed_used = 0;
    ModelParams params;
    ResponseSpec spec;

    std::size_t size() const noexcept { return p.size(); }
    /// Recorded samples per unit of time.
    std::size_t samples_per_unit() const noexcept;
};

/// One explicit Euler-Maruyama step. `noise` is sigma dB for this step.
inline double euler_step(const ModelParams& params, const ResponseSpec& spec, double p, double p_lagged, double p0,
                         double noise, double dt, bool& saturated) noexcept {
    const DriftValue drift = total_drift(params, spec, p, p0, p - p_lagged);
    saturated = saturated || drift.saturated;
    return p + drift.value * dt + noise;
}

/// sigma dB_k for k = 0 .. steps-1 from cfg.noise; exactly zero when sigma = 0.
std::vector<double> noise_increments(const SimConfig& cfg, double sigma);

/// Euler-Maruyama over [0, horizon]. Bit-reproducible for identical inputs.
Trajectory simulate(const ModelParams& params, const ResponseSpec& spec, const FundamentalSchedule& schedule,
                    const SimConfig& cfg);

/// Same as simulate but with caller-supplied increments (sigma dB, one per step).
Trajectory simulate_with_noise(const ModelParams& params, const ResponseSpec& spec,
                               const FundamentalSchedule& schedule, const SimConfig& cfg,
                               std::span<const double> increments);

/// The bubble path and its nu = 0 twin, both driven by the same increments.
std::pair<Trajectory, Trajectory> simulate_paired_ou(const ModelParams& params, const ResponseSpec& spec,
                                                     const FundamentalSchedule& schedule, const SimConfig& cfg);

}  // namespace bubble
