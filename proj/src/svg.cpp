#include "excitonium/runner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace excitonium {

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fixed(double v, int digits = 2) {
    std::ostringstream o;
    o.setf(std::ios::fixed);
    o.precision(digits);
    o << v;
    return o.str();
}

// 1, 2 or 5 times a power of ten, giving roughly `target` ticks.
double tick_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double f : {1.0, 2.0, 5.0}) {
        if (f * mag >= raw) return f * mag;
    }
    return 10.0 * mag;
}

std::string tick_label(double v, double step) {
    const int digits = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step)));
    return fixed(std::abs(v) < 1e-12 * step ? 0.0 : v, digits);
}

constexpr std::array<const char*, 8> palette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                             "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series) {
    constexpr double width = 720, height = 440;
    constexpr double left = 70, right = 170, top = 40, bottom = 55;
    const double pw = width - left - right;
    const double ph = height - top - bottom;

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
    double y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    y0 = std::min(y0, 0.0);
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;

    const auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    const auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::ostringstream o;
    o << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << width << R"(" height=")" << height
      << R"(" font-family="sans-serif" font-size="12">)" << "\n";
    o << R"(<rect width="100%" height="100%" fill="white"/>)" << "\n";
    o << R"(<text x=")" << left + pw / 2 << R"(" y="22" text-anchor="middle" font-size="14">)" << escape(title)
      << "</text>\n";

    const double xs = tick_step(x1 - x0, 6);
    for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
        o << R"(<line x1=")" << fixed(px(t)) << R"(" y1=")" << top + ph << R"(" x2=")" << fixed(px(t)) << R"(" y2=")"
          << top + ph + 5 << R"(" stroke="black"/>)";
        o << R"(<text x=")" << fixed(px(t)) << R"(" y=")" << top + ph + 18 << R"(" text-anchor="middle">)"
          << tick_label(t, xs) << "</text>\n";
    }
    const double ys = tick_step(y1 - y0, 5);
    for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
        o << R"(<line x1=")" << left - 5 << R"(" y1=")" << fixed(py(t)) << R"(" x2=")" << left + pw << R"(" y2=")"
          << fixed(py(t)) << R"(" stroke="#e0e0e0"/>)";
        o << R"(<text x=")" << left - 8 << R"(" y=")" << fixed(py(t) + 4) << R"(" text-anchor="end">)"
          << tick_label(t, ys) << "</text>\n";
    }
    o << R"(<rect x=")" << left << R"(" y=")" << top << R"(" width=")" << pw << R"(" height=")" << ph
      << R"(" fill="none" stroke="black"/>)" << "\n";
    o << R"(<text x=")" << left + pw / 2 << R"(" y=")" << height - 12 << R"(" text-anchor="middle">)"
      << escape(x_label) << "</text>\n";
    o << R"(<text transform="translate(18,)" << top + ph / 2 << R"x() rotate(-90)" text-anchor="middle">)x"
      << escape(y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = palette[k % palette.size()];
        o << R"(<polyline fill="none" stroke=")" << color << R"(" stroke-width="1.5" points=")";
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            o << fixed(px(s.x[i])) << "," << fixed(py(s.y[i])) << " ";
        }
        o << "\"/>\n";
        const double ly = top + 10 + 18.0 * static_cast<double>(k);
        o << R"(<line x1=")" << left + pw + 12 << R"(" y1=")" << ly << R"(" x2=")" << left + pw + 36 << R"(" y2=")"
          << ly << R"(" stroke=")" << color << R"(" stroke-width="2"/>)";
        o << R"(<text x=")" << left + pw + 42 << R"(" y=")" << ly + 4 << R"(">)" << escape(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace excitonium
