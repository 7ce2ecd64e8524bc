#ifndef VISCLUST_PLOT_HPP
#define VISCLUST_PLOT_HPP

// Deterministic SVG scatter plots of 2-D point sets: one fill color per
// label, auto-scaled axes with a light frame and tick marks. The renderer is
// pure string building (fixed formats, no locale or time dependence), so the
// same inputs always produce a byte-identical file.

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "visclust/core.hpp"

namespace visclust {

namespace detail {

inline void append_fmt(std::string& out, const char* fmt, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, a);
    out += buf;
}

// Hue in [0,360), fixed saturation/lightness, converted to #rrggbb.
inline std::string hsl_hex(double hue) {
    const double s = 0.65, l = 0.5;
    const double c = (1.0 - std::abs(2.0 * l - 1.0)) * s;
    const double hp = hue / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else if (hp < 5) { r = x; b = c; }
    else { r = c; b = x; }
    const double mshift = l - c / 2.0;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround((r + mshift) * 255.0)),
                  static_cast<int>(std::lround((g + mshift) * 255.0)),
                  static_cast<int>(std::lround((b + mshift) * 255.0)));
    return buf;
}

inline std::string color_for_index(int idx) {
    static const char* kPalette[] = {
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
        "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#ad494a",
    };
    constexpr int kPaletteSize = static_cast<int>(sizeof kPalette / sizeof *kPalette);
    if (idx < kPaletteSize) return kPalette[idx];
    // Golden-angle hues keep later colors distinct from each other.
    const double hue = std::fmod((idx - kPaletteSize) * 137.50776405003785, 360.0);
    return hsl_hex(hue);
}

}  // namespace detail

inline std::string render_scatter_svg(const Eigen::MatrixXd& xy,
                                      const std::vector<int>& labels) {
    const int m = static_cast<int>(xy.rows());
    if (m < 1) throw InvalidInputError("plot: no points");
    if (xy.cols() != 2) throw DimensionError("plot: points must be 2-D");
    if (static_cast<int>(labels.size()) != m)
        throw InvalidInputError("plot: label count does not match points");
    if (!xy.allFinite()) throw InvalidInputError("plot: non-finite coordinates");

    // Distinct labels in ascending order get palette slots 0, 1, ...
    std::map<int, std::string> color;
    for (int v : labels) color.emplace(v, "");
    {
        int idx = 0;
        for (auto& kv : color) kv.second = detail::color_for_index(idx++);
    }

    const double w = 800, h = 600, margin = 50;
    double x0 = xy.col(0).minCoeff(), x1 = xy.col(0).maxCoeff();
    double y0 = xy.col(1).minCoeff(), y1 = xy.col(1).maxCoeff();
    const double padx = x1 > x0 ? 0.05 * (x1 - x0) : 1.0;
    const double pady = y1 > y0 ? 0.05 * (y1 - y0) : 1.0;
    x0 -= padx; x1 += padx; y0 -= pady; y1 += pady;
    const auto px = [&](double x) { return margin + (x - x0) / (x1 - x0) * (w - 2 * margin); };
    const auto py = [&](double y) { return h - margin - (y - y0) / (y1 - y0) * (h - 2 * margin); };

    std::string svg;
    svg.reserve(static_cast<std::size_t>(m) * 64 + 2048);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" "
                  "height=\"%g\" viewBox=\"0 0 %g %g\">\n",
                  w, h, w, h);
    svg += buf;
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" "
                  "fill=\"none\" stroke=\"#888888\"/>\n",
                  margin, margin, w - 2 * margin, h - 2 * margin);
    svg += buf;
    for (int tick = 0; tick <= 4; ++tick) {
        const double fx = x0 + (x1 - x0) * tick / 4.0;
        const double fy = y0 + (y1 - y0) * tick / 4.0;
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%g\" x2=\"%.2f\" y2=\"%g\" "
                      "stroke=\"#888888\"/>\n",
                      px(fx), h - margin, px(fx), h - margin + 5);
        svg += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.2f\" y=\"%g\" font-size=\"12\" "
                      "text-anchor=\"middle\">%.3g</text>\n",
                      px(fx), h - margin + 20, fx);
        svg += buf;
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%g\" y1=\"%.2f\" x2=\"%g\" y2=\"%.2f\" "
                      "stroke=\"#888888\"/>\n",
                      margin - 5, py(fy), margin, py(fy));
        svg += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%g\" y=\"%.2f\" font-size=\"12\" "
                      "text-anchor=\"end\">%.3g</text>\n",
                      margin - 8, py(fy) + 4, fy);
        svg += buf;
    }
    for (int i = 0; i < m; ++i) {
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\" "
                      "fill-opacity=\"0.8\"/>\n",
                      px(xy(i, 0)), py(xy(i, 1)),
                      color.at(labels[static_cast<std::size_t>(i)]).c_str());
        svg += buf;
    }
    svg += "</svg>\n";
    return svg;
}

inline void write_scatter_svg(const std::string& path, const Eigen::MatrixXd& xy,
                              const std::vector<int>& labels) {
    const std::string svg = render_scatter_svg(xy, labels);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInputError("plot: cannot open output file: " + path);
    out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
    if (!out) throw InvalidInputError("plot: failed writing output file: " + path);
}

}  // namespace visclust

#endif  // VISCLUST_PLOT_HPP
