#pragma once

#include <string>
#include <vector>

namespace alioth {

struct SvgSeries {
    std::string name;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

// Self-contained static line chart; deterministic output bytes.
// Returns false (after logging a warning) when the file cannot be written.
bool write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series);

}  // namespace alioth
