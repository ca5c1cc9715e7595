#include "alioth/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "alioth/logging.hpp"

namespace alioth {

namespace {

constexpr double kWidth = 860.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 160.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

bool write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series) {
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!(xmin <= xmax)) { xmin = 0.0; xmax = 1.0; }
    if (!(ymin <= ymax)) { ymin = 0.0; ymax = 1.0; }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) { ymax = ymin + 0.5; ymin -= 0.5; }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double x) {
        return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w;
    };
    auto py = [&](double y) {
        return kMarginTop + (ymax - y) / (ymax - ymin) * plot_h;
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           tick_label(kWidth) + "\" height=\"" + tick_label(kHeight) +
           "\" viewBox=\"0 0 " + tick_label(kWidth) + " " + tick_label(kHeight) +
           "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(kWidth / 2.0) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">" + title + "</text>\n";

    for (int i = 0; i <= 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 5.0;
        const double fy = ymin + (ymax - ymin) * i / 5.0;
        svg += "<line x1=\"" + num(px(fx)) + "\" y1=\"" + num(kMarginTop) +
               "\" x2=\"" + num(px(fx)) + "\" y2=\"" +
               num(kHeight - kMarginBottom) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(py(fy)) +
               "\" x2=\"" + num(kWidth - kMarginRight) + "\" y2=\"" + num(py(fy)) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + num(px(fx)) + "\" y=\"" +
               num(kHeight - kMarginBottom + 18.0) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">" + tick_label(fx) + "</text>\n";
        svg += "<text x=\"" + num(kMarginLeft - 8.0) + "\" y=\"" +
               num(py(fy) + 4.0) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">" + tick_label(fy) + "</text>\n";
    }

    svg += "<rect x=\"" + num(kMarginLeft) + "\" y=\"" + num(kMarginTop) +
           "\" width=\"" + num(plot_w) + "\" height=\"" + num(plot_h) +
           "\" fill=\"none\" stroke=\"#333333\"/>\n";
    svg += "<text x=\"" + num(kMarginLeft + plot_w / 2.0) + "\" y=\"" +
           num(kHeight - 12.0) + "\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"13\">" + x_label + "</text>\n";
    svg += "<text x=\"18\" y=\"" + num(kMarginTop + plot_h / 2.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 " + num(kMarginTop + plot_h / 2.0) +
           ")\">" + y_label + "</text>\n";

    int legend_row = 0;
    for (const auto& s : series) {
        std::string pts;
        const std::size_t n = std::min(s.x.size(), s.y.size());
        const std::size_t stride = std::max<std::size_t>(1, n / 4000);
        for (std::size_t i = 0; i < n; i += stride) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            pts += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
        }
        if (!pts.empty()) {
            svg += "<polyline fill=\"none\" stroke=\"" + s.color +
                   "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        }
        const double ly = kMarginTop + 14.0 + 18.0 * legend_row++;
        svg += "<line x1=\"" + num(kWidth - kMarginRight + 10.0) + "\" y1=\"" +
               num(ly - 4.0) + "\" x2=\"" + num(kWidth - kMarginRight + 34.0) +
               "\" y2=\"" + num(ly - 4.0) + "\" stroke=\"" + s.color +
               "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + num(kWidth - kMarginRight + 40.0) + "\" y=\"" +
               num(ly) + "\" font-family=\"sans-serif\" font-size=\"12\">" +
               s.name + "</text>\n";
    }
    svg += "</svg>\n";

    std::ofstream f(path, std::ios::binary);
    if (!f) {
        log_warn("cannot open " + path + " for writing");
        return false;
    }
    f << svg;
    if (!f) {
        log_warn("failed writing " + path);
        return false;
    }
    return true;
}

}  // namespace alioth
