#include "bubble/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "bubble/error.hpp"

namespace bubble {

namespace {

using nlohmann::ordered_json;

ordered_json roots_json(const RootSet& r) {
    return {{"x1", r.x1}, {"x2", r.x2}, {"x3", r.x3}, {"x4", r.x4}, {"x4_upper", r.x4_upper}, {"x5", r.x5},
            {"x6", r.x6}};
}

ordered_json scales_json(const Scales& s) {
    return {{"delta_m", s.delta_m}, {"c_m", s.c_m}, {"delta_b", s.delta_b}, {"delta_c", s.delta_c},
            {"a_b", s.a_b},         {"a_c", s.a_c}, {"c_b", s.c_b},         {"c_c", s.c_c}};
}

ordered_json assumptions_json(const AssumptionReport& a) {
    return {{"assumption_I_ratio", a.assumption_I_ratio},
            {"assumption_I_holds", a.assumption_I_holds},
            {"assumption_II_status", std::string(to_string(a.assumption_II_status))},
            {"details", a.details}};
}

ordered_json rates_json(const HeuristicRates& r) {
    return {{"lambda1", r.lambda1}, {"lambda2", r.lambda2}, {"degenerate_sigma", r.degenerate}};
}

ordered_json analysis_object(const Analysis& a, const HeuristicRates& rates) {
    return {{"roots", roots_json(a.roots)},
            {"scales", scales_json(a.scales)},
            {"assumptions", assumptions_json(a.assumptions)},
            {"heuristic_rates", rates_json(rates)}};
}

ordered_json estimate_json(const McEstimate& e) {
    ordered_json j = {{"scenario", e.scenario},     {"p_hat", e.p_hat}, {"ci_halfwidth", e.ci_halfwidth},
                      {"ci_lo", e.ci_lo},           {"ci_hi", e.ci_hi}, {"n", e.n},
                      {"successes", e.successes}, {"acceptance_rate", e.acceptance_rate}};
    if (!e.note.empty()) {
        j["note"] = e.note;
    }
    return j;
}

ordered_json bounds_array(const std::vector<BoundReport>& bounds) {
    ordered_json arr = ordered_json::array();
    for (const auto& b : bounds) {
        ordered_json j = {{"empirical", estimate_json(b.empirical)},
                          {"analytic_bound", b.analytic_bound},
                          {"bound_formula", std::string(to_string(b.formula))},
                          {"K", b.K},
                          {"sigma", b.sigma},
                          {"dominates", b.dominates}};
        if (!b.note.empty()) {
            j["note"] = b.note;
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

ordered_json segmentation_json(const SegmentationReport& s) {
    ordered_json counts = ordered_json::object();
    for (RegimeLabel l : {RegimeLabel::MeanReversion, RegimeLabel::Bubble, RegimeLabel::Collapse,
                          RegimeLabel::Transitory}) {
        counts[std::string(to_string(l))] = std::count(s.window_labels.begin(), s.window_labels.end(), l);
    }
    ordered_json segments = ordered_json::array();
    for (const auto& seg : s.segments) {
        segments.push_back({{"t_start", seg.t_start}, {"t_end", seg.t_end}, {"label", std::string(to_string(seg.label))}});
    }
    ordered_json j = {{"windows", s.window_labels.size()},
                      {"window_counts", counts},
                      {"longest_bubble_run", longest_run(s.window_labels, RegimeLabel::Bubble)},
                      {"ignition_events", s.ignition_events},
                      {"collapse_events", s.collapse_events},
                      {"segments", segments}};
    j["asymptotic_slope_estimate"] =
        s.asymptotic_slope_estimate ? ordered_json(*s.asymptotic_slope_estimate) : ordered_json(nullptr);
    return j;
}

}  // namespace

std::string analysis_to_json(const Analysis& analysis, const HeuristicRates& rates) {
    return analysis_object(analysis, rates).dump(2) + "\n";
}

std::string bounds_to_json(const std::vector<BoundReport>& bounds) { return bounds_array(bounds).dump(2) + "\n"; }

std::string run_report_to_json(const RunReport& report) {
    ordered_json j;
    j["preset"] = report.preset;
    j["seed"] = report.seed;
    j["config"] = report.config_json.empty() ? ordered_json(nullptr) : ordered_json::parse(report.config_json);
    const ordered_json analysis = analysis_object(report.analysis, report.rates);
    for (const auto& [key, value] : analysis.items()) {
        j[key] = value;
    }
    j["segmentation"] = report.segmentation ? segmentation_json(*report.segmentation) : ordered_json(nullptr);
    if (!report.theorems.empty()) {
        ordered_json arr = ordered_json::array();
        for (const auto& t : report.theorems) {
            arr.push_back({{"name", t.name}, {"passed", t.passed}, {"detail", t.detail}});
        }
        j["theorems"] = arr;
    }
    if (!report.bounds.empty()) {
        j["bounds"] = bounds_array(report.bounds);
    }
    ordered_json metrics = ordered_json::object();
    for (const auto& [name, value] : report.metrics) {
        metrics[name] = value;
    }
    j["metrics"] = metrics;
    j["warnings"] = report.warnings;
    j["files"] = report.files;
    return j.dump(2) + "\n";
}

std::string trajectory_csv(const Trajectory& traj, const SegmentationReport* report) {
    std::string out = "t,P,P0,lag_diff,regime\n";
    out.reserve(out.size() + traj.size() * 96);
    const std::size_t spu = traj.samples_per_unit();
    char buf[160];
    for (std::size_t i = 0; i < traj.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,", traj.times[i], traj.p[i], traj.p0[i],
                      traj.lag_diff[i]);
        out += buf;
        if (report != nullptr) {
            std::size_t w = i / spu;
            if (w == report->window_labels.size() && i % spu == 0 && w > 0) {
                w -= 1;  // right end point of the last window
            }
            if (w < report->window_labels.size()) {
                out += to_string(report->window_labels[w]);
            }
        }
        out += '\n';
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    }
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) {
        throw Error(ErrorCode::IoError, "failed writing " + path.string());
    }
}

}  // namespace bubble
