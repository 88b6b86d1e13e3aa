#pragma once

#include <string>
#include <vector>

namespace skycast {

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// Measured-vs-forecast scatter with the identity diagonal.
std::string scatter_svg(const std::string& title, const std::string& x_label,
                        const std::string& y_label,
                        const std::vector<PlotSeries>& series);

// Line plot over sample index (x) against values (y).
std::string line_svg(const std::string& title, const std::string& x_label,
                     const std::string& y_label,
                     const std::vector<PlotSeries>& series);

}  // namespace skycast
