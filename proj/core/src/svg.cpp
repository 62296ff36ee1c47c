#include "bubble/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "bubble/error.hpp"

namespace bubble {

namespace {

constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v == 0.0 ? 0.0 : v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Keeps the first and last point and the min and max of each bucket, in
// x order, so spikes survive decimation.
std::vector<std::size_t> decimate(const std::vector<double>& y, std::size_t max_points) {
    std::vector<std::size_t> keep;
    const std::size_t n = y.size();
    if (n <= max_points || max_points < 4) {
        keep.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            keep[i] = i;
        }
        return keep;
    }
    const std::size_t buckets = max_points / 2;
    keep.push_back(0);
    for (std::size_t b = 0; b < buckets; ++b) {
        const std::size_t lo = 1 + b * (n - 2) / buckets;
        const std::size_t hi = 1 + (b + 1) * (n - 2) / buckets;
        if (lo >= hi) {
            continue;
        }
        std::size_t imin = lo, imax = lo;
        for (std::size_t i = lo; i < hi; ++i) {
            if (y[i] < y[imin]) imin = i;
            if (y[i] > y[imax]) imax = i;
        }
        keep.push_back(std::min(imin, imax));
        if (imin != imax) {
            keep.push_back(std::max(imin, imax));
        }
    }
    keep.push_back(n - 1);
    return keep;
}

// Round step (1, 2 or 5 times a power of ten) giving about `target` ticks.
double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

}  // namespace

std::string render_svg(const std::vector<SvgSeries>& series, const SvgOptions& options) {
    if (series.empty()) {
        throw Error(ErrorCode::ConfigInvalid, "render_svg needs at least one series");
    }
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size() || s.x.empty()) {
            throw Error(ErrorCode::ConfigInvalid, "series '" + s.name + "' has mismatched or empty arrays");
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x_lo = std::min(x_lo, s.x[i]);
            x_hi = std::max(x_hi, s.x[i]);
            if (std::isfinite(s.y[i])) {
                y_lo = std::min(y_lo, s.y[i]);
                y_hi = std::max(y_hi, s.y[i]);
            }
        }
    }
    if (!(y_hi >= y_lo)) {
        y_lo = -1.0;
        y_hi = 1.0;
    }
    if (x_hi == x_lo) {
        x_hi = x_lo + 1.0;
    }
    if (y_hi == y_lo) {
        y_lo -= 1.0;
        y_hi += 1.0;
    }
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    const double w = options.width, h = options.height;
    const double plot_w = w - kMarginLeft - kMarginRight;
    const double plot_h = h - kMarginTop - kMarginBottom;
    auto sx = [&](double x) { return kMarginLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    auto sy = [&](double y) { return kMarginTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(options.width) + "\" height=\"" +
           std::to_string(options.height) + "\" viewBox=\"0 0 " + std::to_string(options.width) + " " +
           std::to_string(options.height) + "\">\n";
    out += "<style>\n"
           "text { font-family: sans-serif; font-size: 12px; fill: #222; }\n"
           ".axis { stroke: #222; stroke-width: 1; }\n"
           ".grid { stroke: #ddd; stroke-width: 0.5; }\n"
           ".series { fill: none; stroke-width: 1.2; }\n"
           ".price { stroke: #1f5fbf; }\n"
           ".fundamental { stroke: #d0701a; stroke-dasharray: 6 3; }\n"
           ".ou { stroke: #6b6b6b; }\n"
           ".extra { stroke: #2a9d4b; }\n"
           "</style>\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        out += "<text x=\"" + num(w / 2) + "\" y=\"22\" text-anchor=\"middle\">" + escape(options.title) +
               "</text>\n";
    }

    const double xs = nice_step(x_hi - x_lo, 8);
    for (double t = std::ceil(x_lo / xs) * xs; t <= x_hi + 1e-9 * xs; t += xs) {
        out += "<line class=\"grid\" x1=\"" + num(sx(t)) + "\" y1=\"" + num(kMarginTop) + "\" x2=\"" + num(sx(t)) +
               "\" y2=\"" + num(kMarginTop + plot_h) + "\"/>\n";
        out += "<text x=\"" + num(sx(t)) + "\" y=\"" + num(kMarginTop + plot_h + 16) +
               "\" text-anchor=\"middle\">" + tick_label(t) + "</text>\n";
    }
    const double ys = nice_step(y_hi - y_lo, 6);
    for (double v = std::ceil(y_lo / ys) * ys; v <= y_hi + 1e-9 * ys; v += ys) {
        out += "<line class=\"grid\" x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(sy(v)) + "\" x2=\"" +
               num(kMarginLeft + plot_w) + "\" y2=\"" + num(sy(v)) + "\"/>\n";
        out += "<text x=\"" + num(kMarginLeft - 6) + "\" y=\"" + num(sy(v) + 4) + "\" text-anchor=\"end\">" +
               tick_label(v) + "</text>\n";
    }
    out += "<line class=\"axis\" x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(kMarginTop + plot_h) + "\" x2=\"" +
           num(kMarginLeft + plot_w) + "\" y2=\"" + num(kMarginTop + plot_h) + "\"/>\n";
    out += "<line class=\"axis\" x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(kMarginTop) + "\" x2=\"" +
           num(kMarginLeft) + "\" y2=\"" + num(kMarginTop + plot_h) + "\"/>\n";
    out += "<text x=\"" + num(kMarginLeft + plot_w / 2) + "\" y=\"" + num(h - 10) + "\" text-anchor=\"middle\">" +
           escape(options.x_label) + "</text>\n";
    out += "<text x=\"16\" y=\"" + num(kMarginTop + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           num(kMarginTop + plot_h / 2) + ")\">" + escape(options.y_label) + "</text>\n";

    for (const auto& s : series) {
        out += "<polyline class=\"series " + escape(s.css_class) + "\" points=\"";
        bool first = true;
        for (std::size_t i : decimate(s.y, options.max_points)) {
            if (!std::isfinite(s.y[i])) {
                continue;
            }
            if (!first) {
                out += ' ';
            }
            out += num(sx(s.x[i])) + "," + num(sy(s.y[i]));
            first = false;
        }
        out += "\"/>\n";
    }

    double ly = kMarginTop + 12;
    for (const auto& s : series) {
        const double lx = kMarginLeft + 12;
        out += "<line class=\"series " + escape(s.css_class) + "\" x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) +
               "\" x2=\"" + num(lx + 24) + "\" y2=\"" + num(ly - 4) + "\"/>\n";
        out += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(ly) + "\">" + escape(s.name) + "</text>\n";
        ly += 16;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace bubble
