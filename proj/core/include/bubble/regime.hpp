#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bubble/analysis.hpp"
#include "bubble/integrator.hpp"

namespace bubble {

enum class RegimeLabel { MeanReversion, Bubble, Collapse, Transitory };

std::string_view to_string(RegimeLabel label);

// Window predicates over the samples of one unit window (both ends
// included). Ties at a threshold never satisfy the predicate. The Monte
// Carlo estimators call these same functions.

/// sup |P - P0| < delta_m.
bool in_corridor(std::span<const double> p, std::span<const double> p0, double delta_m) noexcept;
/// inf lag_diff > threshold.
bool lag_above(std::span<const double> lag_diff, double threshold) noexcept;
/// sup lag_diff < threshold.
bool lag_below(std::span<const double> lag_diff, double threshold) noexcept;
/// inf (P - P0) > 0.
bool above_fundamental(std::span<const double> p, std::span<const double> p0) noexcept;

/// First matching of MeanReversion, Bubble (lag > x5), Collapse (lag < x3
/// and P > P0); Transitory otherwise.
RegimeLabel label_window(std::span<const double> p, std::span<const double> p0, std::span<const double> lag_diff,
                         const RootSet& roots, const Scales& scales) noexcept;

struct Segment {
    double t_start = 0.0;
    double t_end = 0.0;
    RegimeLabel label = RegimeLabel::Transitory;
};

struct SegmentationReport {
    std::vector<RegimeLabel> window_labels;  ///< one per unit window [k, k+1]
    std::vector<Segment> segments;           ///< runs of equal labels, tiling [0, floor(horizon)]
    std::vector<double> ignition_events;
    std::vector<double> collapse_events;
    std::optional<double> asymptotic_slope_estimate;
};

inline constexpr int kCollapseGapWindows = 2;

/// Labels every unit window [k, k+1] in [0, floor(horizon)]. Ignition is the
/// start of a Bubble window preceded by a non-Bubble window; collapse is the
/// start of the first Collapse window after a Bubble window, allowing at most
/// two Transitory windows in between. Throws Error(MismatchedScales) when
/// roots or scales do not belong to the trajectory's parameters.
SegmentationReport classify_segments(const Trajectory& traj, const RootSet& roots, const Scales& scales);

/// Earliest t with lag_diff > a_b on all of [t, t + 1].
std::optional<double> detect_ignition(const Trajectory& traj, double a_b);

/// Least-squares slope of P over the last `tail_fraction` of the run. Throws
/// Error(InsufficientTail) if fewer than two samples fall in the tail.
double asymptotic_slope(const Trajectory& traj, double tail_fraction);

enum class JumpOutcome { NoIgnition, Ignition };

std::string_view to_string(JumpOutcome outcome);

/// sigma = 0 run with P0 jumping from 0 to `jump` at t0 = 1 from a flat
/// history at 0. NoIgnition if -delta_m < P - P+ < delta_m/2 on [t0, t0+1];
/// Ignition if lag_diff > x5 on [t0+1, t0+2]; otherwise
/// Error(InconclusiveRegime).
JumpOutcome verify_deterministic_jump(const ModelParams& params, const ResponseSpec& spec, const RootSet& roots,
                                      const Scales& scales, double jump, double dt = kDefaultDt);

struct TheoremCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// The five sigma = 0 checks: corridor persistence, bubble persistence with
/// slope -> x6, collapse with deceleration, small jump, large jump.
std::vector<TheoremCheck> deterministic_suite(const ModelParams& params, const ResponseSpec& spec,
                                              const RootSet& roots, const Scales& scales, double dt = kDefaultDt);

/// Longest run of consecutive windows carrying `label`.
std::size_t longest_run(const std::vector<RegimeLabel>& labels, RegimeLabel label) noexcept;

inline constexpr std::size_t kSustainedBubbleWindows = 5;

/// At least `min_windows` consecutive Bubble windows.
bool has_sustained_bubble(const SegmentationReport& report,
                          std::size_t min_windows = kSustainedBubbleWindows) noexcept;

/// Ignition events that follow a collapse: after each collapse event the
/// price falls to P0 or below and then recovers above it at time r; an
/// ignition in [floor(r), r + within] counts.
std::vector<double> serial_bubble_ignitions(const Trajectory& traj, const SegmentationReport& report,
                                            double within = 3.0);

/// Sample standard deviation of P(k+1) - P(k) over integer k.
double unit_return_volatility(const Trajectory& traj);

}  // namespace bubble
