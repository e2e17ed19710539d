#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace firn {

struct SvgSeries {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<double> x;
    std::vector<double> y;
};

/// Single-file SVG line plot with no external renderer dependency.
inline void write_svg_plot(const std::string& path, const std::string& title,
                           std::span<const SvgSeries> series) {
    const int W = 860, H = 560, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;
    const auto px = [&](double x) {
        return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr);
    };
    const auto py = [&](double y) {
        return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb);
    };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_svg_plot: cannot open " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
        << "' viewBox='0 0 " << W << " " << H << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";
    // axes with a few ticks
    out << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
        << "' stroke='black'/>\n"
        << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
        << "' stroke='black'/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = xmin + t * (xmax - xmin) / 4.0;
        const double yv = ymin + t * (ymax - ymin) / 4.0;
        out << "<text x='" << px(xv) << "' y='" << H - mb + 18
            << "' text-anchor='middle' font-size='11'>" << xv << "</text>\n"
            << "<text x='" << ml - 6 << "' y='" << py(yv) + 4
            << "' text-anchor='end' font-size='11'>" << yv << "</text>\n"
            << "<line x1='" << px(xv) << "' y1='" << H - mb << "' x2='" << px(xv) << "' y2='"
            << H - mb + 4 << "' stroke='black'/>\n"
            << "<line x1='" << ml - 4 << "' y1='" << py(yv) << "' x2='" << ml << "' y2='"
            << py(yv) << "' stroke='black'/>\n";
    }
    int legend_y = mt + 6;
    for (const auto& s : series) {
        out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << px(s.x[i]) << "," << py(s.y[i]) << " ";
        out << "'/>\n";
        out << "<line x1='" << W - mr - 150 << "' y1='" << legend_y << "' x2='" << W - mr - 120
            << "' y2='" << legend_y << "' stroke='" << s.color << "' stroke-width='2'/>\n"
            << "<text x='" << W - mr - 114 << "' y='" << legend_y + 4 << "' font-size='12'>"
            << s.label << "</text>\n";
        legend_y += 18;
    }
    out << "</svg>\n";
}

} // namespace firn
