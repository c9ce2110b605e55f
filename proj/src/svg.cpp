#include "icp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace icp::svg {

std::string escape_xml(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series) {
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    bool first = true;
    for (const auto& s : series) {
        for (auto [x, y] : s.points) {
            if (first) {
                x_min = x_max = x;
                y_min = y_max = y;
                first = false;
            }
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (x_max <= x_min) x_max = x_min + 1;
    if (y_max <= y_min) y_max = y_min + 1;
    // pad the y range so flat lines do not sit on the frame
    double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    const double width = 640, height = 420;
    const double left = 70, right = 160, top = 40, bottom = 55;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) { return top + (y_max - y) / (y_max - y_min) * plot_h; };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << (left + plot_w / 2) << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << escape_xml(title) << "</text>\n";

    // frame
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
        << plot_h << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

    // y ticks
    for (int i = 0; i <= 4; ++i) {
        double y = y_min + (y_max - y_min) * i / 4.0;
        double yy = py(y);
        out << "<line x1=\"" << (left - 4) << "\" y1=\"" << num(yy) << "\" x2=\"" << left
            << "\" y2=\"" << num(yy) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << (left - 8) << "\" y=\"" << num(yy + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick(y)
            << "</text>\n";
    }
    // x ticks at series points (assumed shared grid), falling back to 5 even ticks
    std::vector<double> x_ticks;
    if (!series.empty())
        for (auto [x, y] : series[0].points) x_ticks.push_back(x);
    if (x_ticks.empty())
        for (int i = 0; i <= 4; ++i) x_ticks.push_back(x_min + (x_max - x_min) * i / 4.0);
    for (double x : x_ticks) {
        double xx = px(x);
        out << "<line x1=\"" << num(xx) << "\" y1=\"" << (top + plot_h) << "\" x2=\"" << num(xx)
            << "\" y2=\"" << (top + plot_h + 4) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << num(xx) << "\" y=\"" << (top + plot_h + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick(x)
            << "</text>\n";
    }

    out << "<text x=\"" << (left + plot_w / 2) << "\" y=\"" << (height - 12)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape_xml(x_label) << "</text>\n";
    out << "<text x=\"18\" y=\"" << (top + plot_h / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 18 " << (top + plot_h / 2) << ")\">" << escape_xml(y_label)
        << "</text>\n";

    double legend_y = top + 10;
    for (const auto& s : series) {
        if (s.points.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"" << s.stroke_width << "\"";
        if (!s.dasharray.empty()) out << " stroke-dasharray=\"" << s.dasharray << "\"";
        out << " points=\"";
        for (auto [x, y] : s.points) out << num(px(x)) << "," << num(py(y)) << " ";
        out << "\"/>\n";

        double lx = left + plot_w + 12;
        out << "<line x1=\"" << lx << "\" y1=\"" << num(legend_y) << "\" x2=\"" << (lx + 34)
            << "\" y2=\"" << num(legend_y) << "\" stroke=\"black\" stroke-width=\""
            << s.stroke_width << "\"";
        if (!s.dasharray.empty()) out << " stroke-dasharray=\"" << s.dasharray << "\"";
        out << "/>\n";
        out << "<text x=\"" << (lx + 40) << "\" y=\"" << num(legend_y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(s.label)
            << "</text>\n";
        legend_y += 18;
    }

    out << "</svg>\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace icp::svg
