#pragma once

#include <cstdint>

namespace bubble {

/// Standard normal CDF, evaluated through erfc so the lower tail keeps full
/// relative precision.
double normal_cdf(double x) noexcept;

/// Upper tail 1 - Phi(x) without cancellation.
double normal_sf(double x) noexcept;

/// Two-sided z for a 95% interval.
inline constexpr double kZ95 = 1.959963984540054;

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval for `successes` out of `n` trials. n = 0 gives [0, 1].
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = kZ95) noexcept;

/// 2 Phi(delta / (K sigma)) - 1, the shape of every stability bound. Returns
/// 1 when sigma = 0 and delta > 0.
double stability_bound(double delta, double sigma, double k = 1.0) noexcept;

}  // namespace bubble
