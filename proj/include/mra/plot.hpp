#pragma once

// Minimal self-contained SVG line plots for experiment artifacts.  The output
// is a pure function of the data (no timestamps, no randomness), so rerunning
// an experiment reproduces the file byte for byte.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace mra {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color;  // filled from a default palette when empty
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

inline std::string render_svg_plot(const std::string& title,
                                   const std::vector<PlotSeries>& series) {
    const double W = 800, H = 480, ml = 80, mr = 24, mt = 48, mb = 56;
    const char* colors[] = {"#2266aa", "#cc3333", "#228844", "#8844aa", "#aa7722"};

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool seen = false;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!seen) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                seen = true;
            } else {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
        }
    if (xmax - xmin <= 0) { xmin -= 1; xmax += 1; }
    if (ymax - ymin <= 0) { ymin -= 1; ymax += 1; }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"480\" "
           "viewBox=\"0 0 800 480\">\n";
    out += "<rect width=\"800\" height=\"480\" fill=\"white\"/>\n";
    out += "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" + title + "</text>\n";

    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        const double yv = ymin + (ymax - ymin) * i / 4.0;
        out += "<line x1=\"" + detail::svg_num(px(xv)) + "\" y1=\"" + detail::svg_num(mt) +
               "\" x2=\"" + detail::svg_num(px(xv)) + "\" y2=\"" + detail::svg_num(H - mb) +
               "\" stroke=\"#dddddd\"/>\n";
        out += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(py(yv)) +
               "\" x2=\"" + detail::svg_num(W - mr) + "\" y2=\"" + detail::svg_num(py(yv)) +
               "\" stroke=\"#dddddd\"/>\n";
        out += "<text x=\"" + detail::svg_num(px(xv)) + "\" y=\"" + detail::svg_num(H - mb + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               detail::tick_label(xv) + "</text>\n";
        out += "<text x=\"" + detail::svg_num(ml - 8) + "\" y=\"" + detail::svg_num(py(yv) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               detail::tick_label(yv) + "</text>\n";
    }
    out += "<rect x=\"" + detail::svg_num(ml) + "\" y=\"" + detail::svg_num(mt) + "\" width=\"" +
           detail::svg_num(W - ml - mr) + "\" height=\"" + detail::svg_num(H - mt - mb) +
           "\" fill=\"none\" stroke=\"#333333\"/>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const std::string color =
            s.color.empty() ? colors[si % (sizeof colors / sizeof colors[0])] : s.color;
        std::string pts;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            pts += detail::svg_num(px(s.x[i])) + "," + detail::svg_num(py(s.y[i])) + " ";
        }
        if (!pts.empty()) pts.pop_back();
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.5\"/>\n";
        const double ly = mt + 16 + 18 * static_cast<double>(si);
        out += "<line x1=\"" + detail::svg_num(W - mr - 150) + "\" y1=\"" + detail::svg_num(ly) +
               "\" x2=\"" + detail::svg_num(W - mr - 126) + "\" y2=\"" + detail::svg_num(ly) +
               "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + detail::svg_num(W - mr - 120) + "\" y=\"" + detail::svg_num(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + s.label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace mra
