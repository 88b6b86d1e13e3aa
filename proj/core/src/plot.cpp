#include "skycast/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace skycast {

namespace {

constexpr int kWidth = 820;
constexpr int kHeight = 620;
constexpr int kMargin = 70;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Extent {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(lo < hi)) {
            lo -= 1.0;
            hi += 1.0;
        }
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    double scale(double v, double out_lo, double out_hi) const {
        return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
    }
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

void header(std::ostringstream& os, const std::string& title,
            const std::string& x_label, const std::string& y_label,
            const Extent& ex, const Extent& ey) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
    // axes
    os << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
       << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
       << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
       << "</text>\n";
    os << "<text x=\"20\" y=\"" << kHeight / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
       << "transform=\"rotate(-90 20 " << kHeight / 2 << ")\">" << y_label << "</text>\n";
    // min/max tick labels
    os << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16
       << "\" font-family=\"sans-serif\" font-size=\"10\">" << num(ex.lo) << "</text>\n";
    os << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(ex.hi)
       << "</text>\n";
    os << "<text x=\"" << kMargin - 6 << "\" y=\"" << kHeight - kMargin
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(ey.lo)
       << "</text>\n";
    os << "<text x=\"" << kMargin - 6 << "\" y=\"" << kMargin + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(ey.hi)
       << "</text>\n";
}

void legend(std::ostringstream& os, const std::vector<PlotSeries>& series) {
    int y = kMargin;
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        os << "<rect x=\"" << kWidth - kMargin - 150 << "\" y=\"" << y - 9
           << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
        os << "<text x=\"" << kWidth - kMargin - 134 << "\" y=\"" << y
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << series[s].name
           << "</text>\n";
        y += 16;
    }
}

void extents(const std::vector<PlotSeries>& series, Extent& ex, Extent& ey) {
    for (const auto& s : series) {
        for (double v : s.x) ex.add(v);
        for (double v : s.y) ey.add(v);
    }
    ex.finish();
    ey.finish();
}

}  // namespace

std::string scatter_svg(const std::string& title, const std::string& x_label,
                        const std::string& y_label,
                        const std::vector<PlotSeries>& series) {
    Extent ex, ey;
    extents(series, ex, ey);

    std::ostringstream os;
    header(os, title, x_label, y_label, ex, ey);

    // identity diagonal over the joint extent
    const double lo = std::max(ex.lo, ey.lo);
    const double hi = std::min(ex.hi, ey.hi);
    if (lo < hi) {
        os << "<line x1=\"" << num(ex.scale(lo, kMargin, kWidth - kMargin)) << "\" y1=\""
           << num(ey.scale(lo, kHeight - kMargin, kMargin)) << "\" x2=\""
           << num(ex.scale(hi, kMargin, kWidth - kMargin)) << "\" y2=\""
           << num(ey.scale(hi, kHeight - kMargin, kMargin))
           << "\" stroke=\"#aaaaaa\" stroke-dasharray=\"4,3\"/>\n";
    }

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (!std::isfinite(series[s].x[i]) || !std::isfinite(series[s].y[i])) continue;
            os << "<circle cx=\"" << num(ex.scale(series[s].x[i], kMargin, kWidth - kMargin))
               << "\" cy=\"" << num(ey.scale(series[s].y[i], kHeight - kMargin, kMargin))
               << "\" r=\"2\" fill=\"" << color << "\" fill-opacity=\"0.5\"/>\n";
        }
    }
    legend(os, series);
    os << "</svg>\n";
    return os.str();
}

std::string line_svg(const std::string& title, const std::string& x_label,
                     const std::string& y_label,
                     const std::vector<PlotSeries>& series) {
    Extent ex, ey;
    extents(series, ex, ey);

    std::ostringstream os;
    header(os, title, x_label, y_label, ex, ey);

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (!std::isfinite(series[s].y[i])) continue;
            os << num(ex.scale(series[s].x[i], kMargin, kWidth - kMargin)) << ","
               << num(ey.scale(series[s].y[i], kHeight - kMargin, kMargin)) << " ";
        }
        os << "\"/>\n";
    }
    legend(os, series);
    os << "</svg>\n";
    return os.str();
}

}  // namespace skycast
