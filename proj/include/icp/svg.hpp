#pragma once

#include <string>
#include <utility>
#include <vector>

namespace icp::svg {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
    std::string dasharray; // empty = solid
    double stroke_width = 1.0;
};

// Minimal self-contained SVG line chart: axes, tick labels, legend, one
// polyline per series distinguished by dash pattern.
void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series);

std::string escape_xml(const std::string& text);

} // namespace icp::svg
