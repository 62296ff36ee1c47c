#pragma once

#include <string>
#include <vector>

namespace bubble {

struct SvgSeries {
    std::string name;
    std::string css_class;  ///< stroke class, e.g. "price", "fundamental", "ou"
    std::vector<double> x;
    std::vector<double> y;
};

struct SvgOptions {
    int width = 960;
    int height = 480;
    std::string title;
    std::string x_label = "t";
    std::string y_label = "log-price";
    std::size_t max_points = 4000;  ///< per series; longer series are decimated by min/max buckets
};

/// Standalone line chart with axes, ticks and a legend. Output depends only
/// on the inputs, byte for byte.
std::string render_svg(const std::vector<SvgSeries>& series, const SvgOptions& options = {});

}  // namespace bubble
