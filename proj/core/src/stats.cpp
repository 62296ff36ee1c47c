#include "bubble/stats.hpp"

#include <cmath>
#include <numbers>

namespace bubble {

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) noexcept {
    if (n == 0) {
        return {0.0, 1.0};
    }
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    WilsonInterval ci{centre - half, centre + half};
    if (successes == 0) {
        ci.lo = 0.0;
    }
    if (successes == n) {
        ci.hi = 1.0;
    }
    if (ci.lo < 0.0) {
        ci.lo = 0.0;
    }
    if (ci.hi > 1.0) {
        ci.hi = 1.0;
    }
    return ci;
}

double stability_bound(double delta, double sigma, double k) noexcept {
    if (sigma == 0.0) {
        return delta > 0.0 ? 1.0 : 0.0;
    }
    // 2 Phi(y) - 1 = erf(y / sqrt 2)
    return std::erf(delta / (k * sigma * std::numbers::sqrt2));
}

}  // namespace bubble
