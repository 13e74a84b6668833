#pragma once

#include "soesn/numerics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace soesn::svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Optional comment embedded in every plot (e.g. a timestamp); omitted when empty.
struct PlotStamp {
    std::optional<std::string> comment;
};

std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series, const PlotStamp& stamp = {});

/// Cells coloured from 0 (white) to 1 (dark); rows drawn top to bottom.
std::string heatmap(const std::string& title, const std::string& row_label, const std::string& col_label,
                    const std::vector<double>& row_values, const std::vector<double>& col_values,
                    const RealMatrix& grid, const PlotStamp& stamp = {});

/// Diverging blue/white/red map scaled to max |entry|.
std::string matrix_image(const std::string& title, const RealMatrix& matrix, const PlotStamp& stamp = {});

/// Box (quartiles), median line and whiskers (min/max) per category.
std::string boxplot(const std::string& title, const std::string& y_label, const std::vector<std::string>& categories,
                    const std::vector<std::vector<double>>& samples, const PlotStamp& stamp = {});

} // namespace soesn::svg
