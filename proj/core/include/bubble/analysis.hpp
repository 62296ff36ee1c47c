#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bubble/error.hpp"
#include "bubble/model.hpp"

namespace bubble {

enum class AssumptionIIStatus { Holds, NoPositiveRoots, DegenerateTangency, ThreeNegativeRoots };

std::string_view to_string(AssumptionIIStatus status);

/// Roots of the two balance equations
///
///   A: nu S(x) = x + mu   ->  x1 < 0 < x5 < x6
///   B: nu S(x) = x        ->  x2 < x3 < 0 < x4 < x4_upper
///
/// B is odd, so x2 = -x4_upper and x3 = -x4.
struct RootSet {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
    double x4 = 0.0;
    double x4_upper = 0.0;
    double x5 = 0.0;
    double x6 = 0.0;

    bool operator==(const RootSet&) const = default;
};

struct Scales {
    double delta_m = 0.0;
    double c_m = 0.0;
    double delta_b = 0.0;
    double delta_c = 0.0;
    double a_b = 0.0;
    double a_c = 0.0;
    double c_b = 0.0;
    double c_c = 0.0;

    bool operator==(const Scales&) const = default;
};

struct AssumptionReport {
    double assumption_I_ratio = 0.0;
    bool assumption_I_holds = false;
    AssumptionIIStatus assumption_II_status = AssumptionIIStatus::Holds;
    std::string details;
};

/// Thrown by solve_roots when equation A does not have the expected root
/// structure.
class AssumptionIIViolated : public Error {
public:
    AssumptionIIViolated(AssumptionIIStatus status, const std::string& message);
    AssumptionIIStatus status() const noexcept { return status_; }

private:
    AssumptionIIStatus status_;
};

inline constexpr double kDefaultAssumptionIThreshold = 0.1;
inline constexpr double kDefaultCm = 0.1;

/// Residual nu S(x) - x - rhs_shift for the balance equations (shift = mu for
/// A, 0 for B).
double balance_residual(const ModelParams& params, const ResponseSpec& spec, double x, double shift) noexcept;

/// All simple roots of nu S(x) = x + shift other than x = 0, sorted. Found
/// by a 1e-3 scan over [-L, L], L = 4 (nu sat + mu), with bisection to 1e-12
/// and extra refinement around local extrema of the residual so that
/// closely spaced pairs are not missed. Roots closer than 1e-6 are merged
/// and reported through `tangency`.
std::vector<double> balance_roots(const ModelParams& params, const ResponseSpec& spec, double shift,
                                  bool* tangency = nullptr);

/// Root structure check without throwing.
AssumptionIIStatus assumption_II_status(const ModelParams& params, const ResponseSpec& spec);

/// Throws AssumptionIIViolated when the structure is wrong, Error(RootStructure)
/// when equation B does not come out with two roots per half-line.
RootSet solve_roots(const ModelParams& params, const ResponseSpec& spec);

/// nu S'(0) / mu against `threshold`; assumption_II_status is filled too.
AssumptionReport verify_assumptions(const ModelParams& params, const ResponseSpec& spec,
                                    double threshold = kDefaultAssumptionIThreshold);

/// Both corridor inequalities at `points` evenly spaced x in [dm/4, dm]:
///   f(P0+x, P0) + nu S(x + dm) < -c_m mu dm
///   f(P0-x, P0) + nu S(-x - dm) > c_m mu dm
bool corridor_holds(const ModelParams& params, const ResponseSpec& spec, double delta_m, double c_m,
                    int points = 512);

/// Largest of 128 log-spaced candidates in [1e-4 x5, x5] passing
/// corridor_holds. Throws Error(NoCorridorFound) if none does.
double find_delta_m(const ModelParams& params, const ResponseSpec& spec, const RootSet& roots,
                    double c_m = kDefaultCm);
double find_delta_m(const ModelParams& params, const ResponseSpec& spec, double c_m = kDefaultCm);

/// Throws Error(ScaleInconsistency) if x5 <= delta_m or c_b, c_c are not
/// positive.
Scales derive_scales(const ModelParams& params, const ResponseSpec& spec, const RootSet& roots, double delta_m,
                     double c_m);

struct HeuristicRates {
    double lambda1 = 0.0;  ///< per-step ignition, 1 - Phi((1+mu) a_b / sigma)
    double lambda2 = 0.0;  ///< per-step bubble to collapse, 1 - Phi(delta_b / sigma)
    bool degenerate = false;  ///< sigma == 0; both rates are exactly 0
};

HeuristicRates heuristic_transition_rates(const ModelParams& params, const Scales& scales) noexcept;

struct Analysis {
    RootSet roots;
    Scales scales;
    AssumptionReport assumptions;
};

/// solve_roots, find_delta_m and derive_scales in one call.
Analysis analyze(const ModelParams& params, const ResponseSpec& spec, double c_m = kDefaultCm,
                 double threshold = kDefaultAssumptionIThreshold);

}  // namespace bubble
