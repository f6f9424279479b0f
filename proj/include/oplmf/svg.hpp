#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oplmf {

struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> values;  // x is the sample index
};

// Minimal line chart: axes, ticks, legend. NaN samples are skipped.
void write_line_chart(std::ostream& out, const std::string& title,
                      const std::string& y_label,
                      const std::vector<SvgSeries>& series);

}  // namespace oplmf
