#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace twmod {

// Minimal line-chart rendering to SVG. Charts are a convenience companion
// to the CSV artifacts, not a primary output.
struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

} // namespace detail

inline std::string render_line_chart(const std::string& title, const std::string& x_label,
                                     const std::string& y_label,
                                     const std::vector<PlotSeries>& series, bool log_x = false,
                                     bool log_y = false) {
    constexpr double width = 720, height = 460;
    constexpr double ml = 80, mr = 30, mt = 48, mb = 60;
    const double pw = width - ml - mr, ph = height - mt - mb;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return log_y ? std::log10(v) : v; };

    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    bool first = true;
    for (const auto& s : series) {
        for (size_t i = 0; i < s.x.size(); ++i) {
            if ((log_x && s.x[i] <= 0) || (log_y && s.y[i] <= 0)) continue;
            double a = tx(s.x[i]), b = ty(s.y[i]);
            if (!std::isfinite(a) || !std::isfinite(b)) continue;
            if (first) { x_min = x_max = a; y_min = y_max = b; first = false; }
            x_min = std::min(x_min, a); x_max = std::max(x_max, a);
            y_min = std::min(y_min, b); y_max = std::max(y_max, b);
        }
    }
    if (x_max == x_min) { x_min -= 0.5; x_max += 0.5; }
    if (y_max == y_min) { y_min -= 0.5; y_max += 0.5; }
    double y_pad = 0.04 * (y_max - y_min);
    y_min -= y_pad; y_max += y_pad;

    auto px = [&](double v) { return ml + (tx(v) - x_min) / (x_max - x_min) * pw; };
    auto py = [&](double v) { return mt + (1.0 - (ty(v) - y_min) / (y_max - y_min)) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

    constexpr int n_ticks = 5;
    for (int i = 0; i <= n_ticks; ++i) {
        double fx = x_min + (x_max - x_min) * i / n_ticks;
        double fy = y_min + (y_max - y_min) * i / n_ticks;
        double gx = ml + pw * i / n_ticks;
        double gy = mt + ph - ph * i / n_ticks;
        svg << "<line x1=\"" << detail::svg_num(gx) << "\" y1=\"" << mt << "\" x2=\""
            << detail::svg_num(gx) << "\" y2=\"" << mt + ph
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg << "<line x1=\"" << ml << "\" y1=\"" << detail::svg_num(gy) << "\" x2=\"" << ml + pw
            << "\" y2=\"" << detail::svg_num(gy)
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << detail::svg_num(gx) << "\" y=\"" << mt + ph + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << detail::tick_label(log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << detail::svg_num(gy + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << detail::tick_label(log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
        << "</text>\n";
    svg << "<text x=\"20\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 20 " << mt + ph / 2 << ")\">" << y_label << "</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = palette[si % (sizeof palette / sizeof *palette)];
        std::ostringstream pts;
        bool pen_down = false;
        for (size_t i = 0; i < s.x.size(); ++i) {
            if ((log_x && s.x[i] <= 0) || (log_y && s.y[i] <= 0) ||
                !std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                pen_down = false;
                continue;
            }
            pts << (pen_down ? " L" : " M") << detail::svg_num(px(s.x[i])) << ' '
                << detail::svg_num(py(s.y[i]));
            pen_down = true;
        }
        svg << "<path d=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
        double lx = ml + pw - 150, ly = mt + 16 + 18 * static_cast<double>(si);
        svg << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 24 << "\" y2=\""
            << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << lx + 30 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace twmod
