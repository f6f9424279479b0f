#include "oplmf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace oplmf {

namespace {

constexpr int kWidth = 860;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

void write_line_chart(std::ostream& out, const std::string& title,
                      const std::string& y_label,
                      const std::vector<SvgSeries>& series) {
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    for (const auto& s : series) {
        count = std::max(count, s.values.size());
        for (double v : s.values) {
            if (std::isfinite(v)) {
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
        }
    }
    if (!(ymin < ymax)) {
        ymin = (std::isfinite(ymin) ? ymin : 0.0) - 1.0;
        ymax = ymin + 2.0;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto to_x = [&](std::size_t i) {
        return kMarginLeft +
               plot_w * static_cast<double>(i) /
                   static_cast<double>(std::max<std::size_t>(count - 1, 1));
    };
    const auto to_y = [&](double v) {
        return kMarginTop + plot_h * (ymax - v) / (ymax - ymin);
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << title << "</text>\n";

    // frame and ticks
    out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop
        << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double v = ymin + (ymax - ymin) * t / 5.0;
        const double y = to_y(v);
        out << "<line x1=\"" << kMarginLeft - 4 << "\" y1=\"" << y << "\" x2=\""
            << kMarginLeft << "\" y2=\"" << y << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << fmt(v) << "</text>\n";
        const std::size_t xi = count > 0 ? count * t / 5 : 0;
        const double x = to_x(std::min(xi, count > 0 ? count - 1 : 0));
        out << "<line x1=\"" << x << "\" y1=\"" << kMarginTop + plot_h
            << "\" x2=\"" << x << "\" y2=\"" << kMarginTop + plot_h + 4
            << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << x << "\" y=\"" << kMarginTop + plot_h + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << xi << "</text>\n";
    }
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">iteration</text>\n"
        << "<text x=\"16\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\" transform=\"rotate(-90 16 "
        << kHeight / 2 << ")\">" << y_label << "</text>\n";

    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.2\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            if (!std::isfinite(s.values[i])) {
                continue;
            }
            if (!first) {
                out << ' ';
            }
            out << fmt(to_x(i)) << ',' << fmt(to_y(s.values[i]));
            first = false;
        }
        out << "\"/>\n";
    }

    // legend
    int ly = kMarginTop + 10;
    for (const auto& s : series) {
        out << "<line x1=\"" << kWidth - 170 << "\" y1=\"" << ly << "\" x2=\""
            << kWidth - 140 << "\" y2=\"" << ly << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << kWidth - 134 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
            << "</text>\n";
        ly += 18;
    }
    out << "</svg>\n";
}

}  // namespace oplmf
