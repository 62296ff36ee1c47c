#include "bubble/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bubble/error.hpp"

namespace bubble {

namespace {

std::size_t whole_steps(double span, double dt, const char* what) {
    const double ratio = span / dt;
    const double rounded = std::round(ratio);
    if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-9 * rounded) {
        std::ostringstream msg;
        msg << what << " / dt must be a positive integer (got " << ratio << ")";
        throw Error(ErrorCode::ConfigInvalid, msg.str());
    }
    return static_cast<std::size_t>(rounded);
}

}  // namespace

void SimConfig::validate() const {
    if (!(dt > 0.0 && dt <= 1.0)) {
        throw Error(ErrorCode::ConfigInvalid, "dt must lie in (0, 1]");
    }
    const std::size_t m = whole_steps(1.0, dt, "1");
    if (!(horizon >= 1.0) || !std::isfinite(horizon)) {
        throw Error(ErrorCode::ConfigInvalid, "horizon must be at least 1");
    }
    whole_steps(horizon, dt, "horizon");
    if (record_stride < 1 || m % static_cast<std::size_t>(record_stride) != 0) {
        throw Error(ErrorCode::ConfigInvalid, "record_stride must be >= 1 and divide 1/dt");
    }
    if (const auto* s = std::get_if<SampledHistory>(&history)) {
        if (s->values.size() != m + 1) {
            throw Error(ErrorCode::ConfigInvalid, "sampled history needs 1/dt + 1 values");
        }
        for (double v : s->values) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::ConfigInvalid, "sampled history contains a non-finite value");
            }
        }
    }
}

std::size_t SimConfig::steps_per_unit() const { return whole_steps(1.0, dt, "1"); }

std::size_t SimConfig::total_steps() const { return whole_steps(horizon, dt, "horizon"); }

std::size_t Trajectory::samples_per_unit() const noexcept {
    return static_cast<std::size_t>(std::llround(1.0 / dt)) / static_cast<std::size_t>(record_stride);
}

std::vector<double> history_values(const InitialHistory& history, double dt) {
    const std::size_t m = whole_steps(1.0, dt, "1");
    std::vector<double> values(m + 1);
    if (const auto* c = std::get_if<ConstantHistory>(&history)) {
        std::fill(values.begin(), values.end(), c->p_init);
    } else if (const auto* l = std::get_if<LinearHistory>(&history)) {
        for (std::size_t j = 0; j <= m; ++j) {
            const double t = -static_cast<double>(m - j) * dt;
            values[j] = l->p_end + l->slope * t;
        }
    } else {
        values = std::get<SampledHistory>(history).values;
    }
    return values;
}

std::vector<double> noise_increments(const SimConfig& cfg, double sigma) {
    const std::size_t n = cfg.total_steps();
    if (sigma == 0.0) {
        return std::vector<double>(n, 0.0);
    }
    return brownian_path(cfg.noise, sigma, cfg.dt, n);
}

Trajectory simulate_with_noise(const ModelParams& params, const ResponseSpec& spec,
                               const FundamentalSchedule& schedule, const SimConfig& cfg,
                               std::span<const double> increments) {
    params.validate();
    spec.validate();
    cfg.validate();
    validate_schedule(schedule, params, cfg.horizon);

    const std::size_t m = cfg.steps_per_unit();
    const std::size_t n = cfg.total_steps();
    if (increments.size() != n) {
        throw Error(ErrorCode::ConfigInvalid, "noise increment count does not match horizon / dt");
    }
    const std::vector<double> p0 = sample_fundamental(schedule, cfg.dt, n);

    std::vector<double> path = history_values(cfg.history, cfg.dt);
    path.resize(m + 1 + n);
    bool saturated = false;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = m + k;
        path[i + 1] = euler_step(params, spec, path[i], path[i - m], p0[k], increments[k], cfg.dt, saturated);
    }
    for (std::size_t i = m; i < path.size(); ++i) {
        if (!std::isfinite(path[i])) {
            throw Error(ErrorCode::NumericalOverflow, "price became non-finite despite the exp saturation guard");
        }
    }

    const auto stride = static_cast<std::size_t>(cfg.record_stride);
    const std::size_t recorded = n / stride + 1;
    Trajectory out;
    out.times.resize(recorded);
    out.p.resize(recorded);
    out.p0.resize(recorded);
    out.lag_diff.resize(recorded);
    out.noise_increments.assign(recorded, 0.0);
    for (std::size_t r = 0; r < recorded; ++r) {
        const std::size_t k = r * stride;
        out.times[r] = static_cast<double>(k) * cfg.dt;
        out.p[r] = path[m + k];
        out.p0[r] = p0[k];
        out.lag_diff[r] = path[m + k] - path[k];
        if (r > 0) {
            double sum = 0.0;
            for (std::size_t j = k - stride; j < k; ++j) {
                sum += increments[j];
            }
            out.noise_increments[r] = sum;
        }
    }
    out.history.assign(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(m + 1));
    out.dt = cfg.dt;
    out.record_stride = cfg.record_stride;
    out.saturation_flag = saturated;
    out.seed_used = cfg.noise.seed;
    out.params = params;
    out.spec = spec;
    return out;
}

Trajectory simulate(const ModelParams& params, const ResponseSpec& spec, const FundamentalSchedule& schedule,
                    const SimConfig& cfg) {
    cfg.validate();
    const std::vector<double> increments = noise_increments(cfg, params.sigma);
    return simulate_with_noise(params, spec, schedule, cfg, increments);
}

std::pair<Trajectory, Trajectory> simulate_paired_ou(const ModelParams& params, const ResponseSpec& spec,
                                                     const FundamentalSchedule& schedule, const SimConfig& cfg) {
    cfg.validate();
    const std::vector<double> increments = noise_increments(cfg, params.sigma);
    ModelParams ou = params;
    ou.nu = 0.0;
    return {simulate_with_noise(params, spec, schedule, cfg, increments),
            simulate_with_noise(ou, spec, schedule, cfg, increments)};
}

}  // namespace bubble
