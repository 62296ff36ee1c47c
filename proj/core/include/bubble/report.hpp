#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bubble/analysis.hpp"
#include "bubble/integrator.hpp"
#include "bubble/mc.hpp"
#include "bubble/regime.hpp"

namespace bubble {

struct RunReport {
    std::string preset;
    std::uint64_t seed = 0;
    std::string config_json;  ///< bundle_to_json of the inputs
    Analysis analysis;
    HeuristicRates rates;
    std::optional<SegmentationReport> segmentation;
    std::vector<BoundReport> bounds;
    std::vector<TheoremCheck> theorems;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> warnings;
    std::vector<std::string> files;  ///< relative to the output directory
};

std::string analysis_to_json(const Analysis& analysis, const HeuristicRates& rates);
std::string bounds_to_json(const std::vector<BoundReport>& bounds);
std::string run_report_to_json(const RunReport& report);

/// Columns t,P,P0,lag_diff,regime with 17 significant digits. `regime` is
/// the label of the unit window containing t (empty without a report or
/// past the last full window).
std::string trajectory_csv(const Trajectory& traj, const SegmentationReport* report = nullptr);

/// Throws Error(IoError) on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace bubble
