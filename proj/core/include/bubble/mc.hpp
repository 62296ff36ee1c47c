#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bubble/analysis.hpp"
#include "bubble/integrator.hpp"
#include "bubble/regime.hpp"
#include "bubble/rng.hpp"

namespace bubble {

/// How replicate histories on [t0-1, t0] are produced.
///  Deterministic: a noise-free history that satisfies the hypothesis by
///    construction (its Brownian increments are identically zero).
///  Rejection: one noisy burn-in unit is simulated from a noise-free
///    pre-history and kept only if it satisfies the hypothesis, including
///    the bound on the Brownian motion over the past window.
enum class HistoryMode { Deterministic, Rejection };

struct McConfig {
    std::uint64_t replicates = 10000;
    std::uint64_t base_seed = 1;
    double dt = kDefaultDt;
    unsigned threads = 0;  ///< 0: hardware concurrency
    double K = 1.0;        ///< stand-in for the unknown constant in the stability bounds
    NoiseFamily noise = NoiseFamily::Gaussian;
    HistoryMode history = HistoryMode::Deterministic;
    double bubble_start_offset = 20.0;    ///< P(t0) - P0 for bubble-type starts (history slope x6)
    double collapse_start_offset = 50.0;  ///< P(t0) - P0 for collapse starts (history slope x1)
    std::uint64_t max_attempts = 1000;    ///< rejection attempts per replicate

    /// Throws Error(ConfigInvalid): replicates >= 100, dt valid, K > 0.
    void validate() const;

    bool operator==(const McConfig&) const = default;
};

enum class McScenario {
    MeanReversionStability,
    BubbleStability,
    CollapseStability,
    Ignition,
    CollapseTransition,
    SmallJump,
    LargeJump,
    Corridor,
};

std::string_view to_string(McScenario scenario);

struct McEstimate {
    double p_hat = 0.0;
    double ci_halfwidth = 0.0;  ///< half the width of the 95% Wilson interval
    double ci_lo = 0.0;
    double ci_hi = 1.0;
    std::uint64_t n = 0;
    std::uint64_t successes = 0;
    std::string scenario;
    double acceptance_rate = 1.0;  ///< replicates / attempts under rejection sampling
    std::string note;
};

McEstimate make_estimate(std::uint64_t successes, std::uint64_t n, std::string scenario);

enum class BoundFormula { StabilityPhi, IgnitionP0, CollapseBound, GirsanovCorridor };

std::string_view to_string(BoundFormula formula);

struct BoundReport {
    McEstimate empirical;
    double analytic_bound = 0.0;
    BoundFormula formula = BoundFormula::StabilityPhi;
    double K = 1.0;
    double sigma = 0.0;
    bool dominates = false;  ///< p_hat - ci_halfwidth >= analytic_bound
    std::string note;
};

BoundReport make_report(McEstimate empirical, double bound, BoundFormula formula, double K, double sigma,
                        std::string note = {});

/// e^{-cb - c^2 t/2} (2 Phi(b / sqrt t) - 1).
double girsanov_lower_bound(double c, double b, double t) noexcept;

/// Fraction of discretized Brownian paths with max_{s<=t} |B_s - c s| <= b.
/// Path i uses stream i of `seed`. Requires n_paths >= 1000 and dt <= 1e-3 t.
McEstimate empirical_corridor_probability(double c, double b, double t, std::uint64_t n_paths, double dt,
                                          std::uint64_t seed, unsigned threads = 0);

/// Same estimator for every (c, b) pair at once, sharing the Brownian paths.
/// Result is indexed [ic * bs.size() + ib].
std::vector<McEstimate> empirical_corridor_grid(const std::vector<double>& cs, const std::vector<double>& bs,
                                                double t, std::uint64_t n_paths, double dt, std::uint64_t seed,
                                                unsigned threads = 0);

/// Throw Error(DegenerateSigma) when sigma = 0.
double ignition_lower_bound(const ModelParams& params, const Scales& scales);
double collapse_lower_bound(const ModelParams& params, const Scales& scales);

/// Raw Monte Carlo for one scenario. `jump` is used by the jump scenarios only.
McEstimate estimate_scenario(McScenario scenario, const ModelParams& params, const ResponseSpec& spec,
                             const RootSet& roots, const Scales& scales, const McConfig& cfg, double jump = 0.0);

/// Stability over one unit window for MeanReversion, Bubble or Collapse
/// against 2 Phi(delta / (K sigma)) - 1.
BoundReport estimate_regime_stability(RegimeLabel regime, const ModelParams& params, const ResponseSpec& spec,
                                      const RootSet& roots, const Scales& scales, const McConfig& cfg);

BoundReport estimate_ignition_probability(const ModelParams& params, const ResponseSpec& spec,
                                          const RootSet& roots, const Scales& scales, const McConfig& cfg);

BoundReport estimate_collapse_probability(const ModelParams& params, const ResponseSpec& spec,
                                          const RootSet& roots, const Scales& scales, const McConfig& cfg);

enum class JumpMode { Auto, Small, Large };

/// Jump size threshold (2 a_b + 3 delta_m) / min(mu, 1) above which the
/// large-jump statement applies.
double large_jump_threshold(const ModelParams& params, const Scales& scales) noexcept;

/// Small mode: stay in the corridor around P+ for one unit, bound
/// 2 Phi(delta_m / (K sigma)) - 1. Large mode: lag_diff > a_b on [t0+1, t0+2],
/// bound 2 Phi(min(delta_m, c_b delta_b) / (K sigma)) - 1. Auto picks Large
/// at or above large_jump_threshold. The note flags sizes outside the range
/// where the chosen statement is proved.
BoundReport estimate_random_jump_ignition(const ModelParams& params, const ResponseSpec& spec,
                                          const RootSet& roots, const Scales& scales, double jump_size,
                                          const McConfig& cfg, JumpMode mode = JumpMode::Auto);

}  // namespace bubble
