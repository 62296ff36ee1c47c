#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bubble/analysis.hpp"
#include "bubble/integrator.hpp"
#include "bubble/mc.hpp"
#include "bubble/model.hpp"
#include "bubble/report.hpp"

namespace bubble {

/// Everything needed to reproduce one run.
struct ScenarioBundle {
    std::string name;
    ModelParams params;
    ResponseSpec spec;
    FundamentalSchedule schedule = ConstantFundamental{};
    SimConfig sim;
    bool paired_ou = false;
    double c_m = kDefaultCm;
    McConfig mc;

    bool operator==(const ScenarioBundle&) const = default;
};

/// regime1, regime1-serial, regime2, regime3-a, regime3-b, jump-small,
/// jump-large, varying-p0, deterministic-suite.
const std::vector<std::string>& preset_names();

/// Throws Error(ConfigInvalid) for an unknown name.
ScenarioBundle make_preset(std::string_view name);

/// Sets the price-noise seed, the MC base seed and, for random-walk
/// fundamentals, the walk's seed.
void set_seed(ScenarioBundle& bundle, std::uint64_t seed);

/// Applies a JSON document on top of `base`. A top-level "preset" key
/// replaces the base first. Unknown keys and wrong types raise
/// Error(ParseError) naming the field; syntax errors name the line.
ScenarioBundle parse_config_text(std::string_view text, const ScenarioBundle& base);
ScenarioBundle parse_config(const std::filesystem::path& path, const ScenarioBundle& base);

/// Canonical JSON form of a bundle, accepted back by parse_config_text.
/// The thread count is not part of it since it never changes results.
std::string bundle_to_json(const ScenarioBundle& bundle);

struct RunOptions {
    bool svg = true;
    std::uint64_t mc_replicates = 0;  ///< 0 skips the Monte Carlo bound reports
    unsigned threads = 0;
};

/// Roots and scales, simulation (paired with the nu = 0 twin when the
/// preset asks for it), classification, then <name>.csv, <name>_ou.csv,
/// <name>.svg and <name>.json in `output_dir`. AssumptionIIViolated
/// propagates unchanged.
RunReport run_scenario(const ScenarioBundle& bundle, const std::filesystem::path& output_dir,
                       const RunOptions& options = {});

}  // namespace bubble
