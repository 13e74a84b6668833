#include "soesn/svg.hpp"

#include "soesn/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace soesn::svg {

namespace {

constexpr double kWidth = 800;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v)
{
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", v);
    return buffer;
}

std::string label(double v)
{
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.3g", v);
    return buffer;
}

std::string escape(const std::string& text)
{
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

void open_document(std::ostringstream& out, const std::string& title, const PlotStamp& stamp, double width = kWidth,
                   double height = kHeight)
{
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    if (stamp.comment) {
        out << "<!-- " << escape(*stamp.comment) << " -->\n";
    }
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
        << "</text>\n";
}

struct Axes {
    double x_min, x_max, y_min, y_max;

    double px(double x) const { return kLeft + (x - x_min) / (x_max - x_min) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y_min) / (y_max - y_min) * (kHeight - kTop - kBottom); }
};

void draw_axes(std::ostringstream& out, const Axes& axes, const std::string& x_label, const std::string& y_label)
{
    const double x0 = kLeft;
    const double x1 = kWidth - kRight;
    const double y0 = kHeight - kBottom;
    const double y1 = kTop;
    out << "<path d=\"M" << num(x0) << ' ' << num(y1) << " V" << num(y0) << " H" << num(x1)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = axes.x_min + (axes.x_max - axes.x_min) * i / 4.0;
        const double yv = axes.y_min + (axes.y_max - axes.y_min) * i / 4.0;
        out << "<text x=\"" << num(axes.px(xv)) << "\" y=\"" << num(y0 + 18) << "\" text-anchor=\"middle\">"
            << label(xv) << "</text>\n";
        out << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(axes.py(yv) + 4) << "\" text-anchor=\"end\">"
            << label(yv) << "</text>\n";
    }
    out << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 18) << "\" text-anchor=\"middle\">"
        << escape(x_label) << "</text>\n";
    out << "<text transform=\"translate(18 " << num((y0 + y1) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(y_label) << "</text>\n";
}

} // namespace

std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series, const PlotStamp& stamp)
{
    Axes axes{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& s : series) {
        for (double x : s.x) {
            axes.x_min = std::min(axes.x_min, x);
            axes.x_max = std::max(axes.x_max, x);
        }
        for (double y : s.y) {
            if (std::isfinite(y)) {
                axes.y_min = std::min(axes.y_min, y);
                axes.y_max = std::max(axes.y_max, y);
            }
        }
    }
    if (!std::isfinite(axes.x_min)) {
        axes = {0, 1, 0, 1};
    }
    if (axes.x_max <= axes.x_min) {
        axes.x_max = axes.x_min + 1;
    }
    if (axes.y_max <= axes.y_min) {
        axes.y_min -= 0.5;
        axes.y_max += 0.5;
    }
    const double pad = 0.05 * (axes.y_max - axes.y_min);
    axes.y_min -= pad;
    axes.y_max += pad;

    std::ostringstream out;
    open_document(out, title, stamp);
    draw_axes(out, axes, x_label, y_label);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* colour = kPalette[k % std::size(kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (std::isfinite(s.y[i])) {
                out << num(axes.px(s.x[i])) << ',' << num(axes.py(s.y[i])) << ' ';
            }
        }
        out << "\"/>\n";
        const double ly = kTop + 10 + 18.0 * static_cast<double>(k);
        out << "<line x1=\"" << num(kWidth - kRight + 10) << "\" y1=\"" << num(ly) << "\" x2=\""
            << num(kWidth - kRight + 30) << "\" y2=\"" << num(ly) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << num(kWidth - kRight + 34) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.name)
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string heatmap(const std::string& title, const std::string& row_label, const std::string& col_label,
                    const std::vector<double>& row_values, const std::vector<double>& col_values,
                    const RealMatrix& grid, const PlotStamp& stamp)
{
    std::ostringstream out;
    open_document(out, title, stamp);
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const auto rows = std::max<Eigen::Index>(grid.rows(), 1);
    const auto cols = std::max<Eigen::Index>(grid.cols(), 1);
    const double cw = plot_w / static_cast<double>(cols);
    const double ch = plot_h / static_cast<double>(rows);
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
        for (Eigen::Index j = 0; j < grid.cols(); ++j) {
            const double v = std::clamp(grid(i, j), 0.0, 1.0);
            const int shade = static_cast<int>(std::lround(255.0 * (1.0 - v)));
            out << "<rect x=\"" << num(kLeft + cw * static_cast<double>(j)) << "\" y=\""
                << num(kTop + ch * static_cast<double>(i)) << "\" width=\"" << num(cw) << "\" height=\"" << num(ch)
                << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\"><title>" << label(grid(i, j))
                << "</title></rect>\n";
        }
    }
    const auto step_r = std::max<std::size_t>(1, row_values.size() / 10);
    for (std::size_t i = 0; i < row_values.size(); i += step_r) {
        out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(kTop + ch * (static_cast<double>(i) + 0.5) + 4)
            << "\" text-anchor=\"end\">" << label(row_values[i]) << "</text>\n";
    }
    const auto step_c = std::max<std::size_t>(1, col_values.size() / 10);
    for (std::size_t j = 0; j < col_values.size(); j += step_c) {
        out << "<text x=\"" << num(kLeft + cw * (static_cast<double>(j) + 0.5)) << "\" y=\""
            << num(kHeight - kBottom + 18) << "\" text-anchor=\"middle\">" << label(col_values[j]) << "</text>\n";
    }
    out << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 18) << "\" text-anchor=\"middle\">"
        << escape(col_label) << "</text>\n";
    out << "<text transform=\"translate(18 " << num(kTop + plot_h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(row_label) << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

std::string matrix_image(const std::string& title, const RealMatrix& matrix, const PlotStamp& stamp)
{
    const double side = 480;
    std::ostringstream out;
    open_document(out, title, stamp, side + 40, side + 60);
    const double scale = std::max(matrix.cwiseAbs().maxCoeff(), 1e-300);
    const double cell = side / static_cast<double>(std::max<Eigen::Index>(matrix.rows(), 1));
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
            const double v = matrix(i, j) / scale;
            if (v == 0.0) {
                continue;
            }
            const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(v))));
            const std::string colour = v > 0 ? "rgb(255," + std::to_string(fade) + ',' + std::to_string(fade) + ')'
                                             : "rgb(" + std::to_string(fade) + ',' + std::to_string(fade) + ",255)";
            out << "<rect x=\"" << num(20 + cell * static_cast<double>(j)) << "\" y=\""
                << num(40 + cell * static_cast<double>(i)) << "\" width=\"" << num(cell) << "\" height=\"" << num(cell)
                << "\" fill=\"" << colour << "\"/>\n";
        }
    }
    out << "<rect x=\"20\" y=\"40\" width=\"" << num(side) << "\" height=\"" << num(side)
        << "\" fill=\"none\" stroke=\"black\"/>\n</svg>\n";
    return out.str();
}

std::string boxplot(const std::string& title, const std::string& y_label, const std::vector<std::string>& categories,
                    const std::vector<std::vector<double>>& samples, const PlotStamp& stamp)
{
    Axes axes{0.0, static_cast<double>(std::max<std::size_t>(categories.size(), 1)), 0.0, 0.0};
    bool any = false;
    for (const auto& s : samples) {
        for (double v : s) {
            if (!std::isfinite(v)) {
                continue;
            }
            axes.y_min = any ? std::min(axes.y_min, v) : v;
            axes.y_max = any ? std::max(axes.y_max, v) : v;
            any = true;
        }
    }
    if (axes.y_max <= axes.y_min) {
        axes.y_max = axes.y_min + 1.0;
    }
    std::ostringstream out;
    open_document(out, title, stamp);
    draw_axes(out, axes, "", y_label);
    for (std::size_t k = 0; k < categories.size(); ++k) {
        const double centre = axes.px(static_cast<double>(k) + 0.5);
        out << "<text x=\"" << num(centre) << "\" y=\"" << num(kHeight - kBottom + 34) << "\" text-anchor=\"middle\">"
            << escape(categories[k]) << "</text>\n";
        if (k >= samples.size() || samples[k].empty()) {
            continue;
        }
        auto sorted = samples[k];
        std::sort(sorted.begin(), sorted.end());
        auto q = [&sorted](double p) {
            const double pos = p * static_cast<double>(sorted.size() - 1);
            const auto lo = static_cast<std::size_t>(pos);
            const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
            return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
        };
        const double half = 0.25 * (axes.px(1.0) - axes.px(0.0));
        out << "<line x1=\"" << num(centre) << "\" y1=\"" << num(axes.py(sorted.front())) << "\" x2=\"" << num(centre)
            << "\" y2=\"" << num(axes.py(sorted.back())) << "\" stroke=\"black\"/>\n";
        out << "<rect x=\"" << num(centre - half) << "\" y=\"" << num(axes.py(q(0.75))) << "\" width=\"" << num(2 * half)
            << "\" height=\"" << num(axes.py(q(0.25)) - axes.py(q(0.75))) << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << num(centre - half) << "\" y1=\"" << num(axes.py(q(0.5))) << "\" x2=\""
            << num(centre + half) << "\" y2=\"" << num(axes.py(q(0.5))) << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace soesn::svg
