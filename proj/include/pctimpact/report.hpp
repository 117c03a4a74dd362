#ifndef PCTIMPACT_REPORT_HPP
#define PCTIMPACT_REPORT_HPP

// Report tables (TSV rendering with the display precision of the published
// tables) and deterministic SVG confidence-interval charts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pctimpact/errors.hpp"

namespace pctimpact::report {

/// Display rules: means/SDs/SEs/CIs 2 decimals, d/h 3, p 4 with "<.0001"
/// below 5e-5, counts as integers.
enum class CellFormat { Fixed2, Fixed3, Fixed4, PValue, Count, Text };

struct Cell {
    std::optional<double> value;  // empty renders as the undefined marker
    CellFormat format = CellFormat::Fixed2;
    std::string text;  // CellFormat::Text only
};

inline constexpr const char* kUndefined = "NA";

inline std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    std::string s(buf);
    // Avoid "-0.00".
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

inline std::string format_p(double p) { return p < 5e-5 ? "<.0001" : fixed(p, 4); }

inline std::string render(const Cell& c) {
    if (c.format == CellFormat::Text) return c.text;
    if (!c.value || !std::isfinite(*c.value)) return kUndefined;
    switch (c.format) {
    case CellFormat::Fixed2: return fixed(*c.value, 2);
    case CellFormat::Fixed3: return fixed(*c.value, 3);
    case CellFormat::Fixed4: return fixed(*c.value, 4);
    case CellFormat::PValue: return format_p(*c.value);
    case CellFormat::Count: return fixed(*c.value, 0);
    case CellFormat::Text: break;
    }
    return c.text;
}

struct ReportTable {
    std::string title;
    std::vector<std::string> columns;
    std::vector<std::string> row_labels;
    std::vector<std::vector<Cell>> rows;  // rows[r][c]
    std::vector<std::string> footnotes;

    void add_row(std::string label, std::vector<Cell> cells) {
        if (cells.size() != columns.size()) throw PreconditionError("report row '" + label + "' has the wrong width");
        row_labels.push_back(std::move(label));
        rows.push_back(std::move(cells));
    }

    const Cell& at(std::string_view row, std::size_t column) const {
        for (std::size_t r = 0; r < row_labels.size(); ++r)
            if (row_labels[r] == row) return rows[r].at(column);
        throw PreconditionError("no report row '" + std::string(row) + "'");
    }

    std::string to_tsv() const {
        std::ostringstream out;
        out << "# " << title << '\n';
        out << "Statistical Measure";
        for (const auto& c : columns) out << '\t' << c;
        out << '\n';
        for (std::size_t r = 0; r < rows.size(); ++r) {
            out << row_labels[r];
            for (const auto& cell : rows[r]) out << '\t' << render(cell);
            out << '\n';
        }
        for (const auto& f : footnotes) out << "# " << f << '\n';
        return out.str();
    }
};

struct ChartSeries {
    std::string label;
    double point = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct CiChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<ChartSeries> series;
    std::optional<double> reference_line;
    double scale = 1.0;  // applied to every value before plotting (100 for proportions)
};

/// Pixel geometry of a chart; the SVG is drawn from this.
struct ChartLayout {
    static constexpr double kWidth = 640.0;
    static constexpr double kHeight = 400.0;
    static constexpr double kLeft = 70.0;
    static constexpr double kRight = 20.0;
    static constexpr double kTop = 40.0;
    static constexpr double kBottom = 60.0;

    struct Bar {
        double x;
        double y_point;
        double y_low;   // pixel y of ci_low (larger y is lower on screen)
        double y_high;  // pixel y of ci_high
    };

    double y_min = 0.0;  // data range covered by the plot area
    double y_max = 1.0;
    std::vector<double> ticks;
    std::vector<Bar> bars;
    std::optional<double> reference_y;

    double plot_left() const { return kLeft; }
    double plot_right() const { return kWidth - kRight; }
    double plot_top() const { return kTop; }
    double plot_bottom() const { return kHeight - kBottom; }

    double to_pixel(double v) const {
        return plot_bottom() - (v - y_min) / (y_max - y_min) * (plot_bottom() - plot_top());
    }
};

namespace detail {

inline double nice_step(double range) {
    const double raw = range / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    const double nice = f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0;
    return nice * mag;
}

inline std::string xml_escape(std::string_view s) {
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

} // namespace detail

inline ChartLayout layout_chart(const CiChartSpec& spec) {
    if (spec.series.empty()) throw PreconditionError("render_ci_chart: no series to draw");
    ChartLayout lay;
    double lo = spec.series.front().ci_low * spec.scale;
    double hi = spec.series.front().ci_high * spec.scale;
    for (const auto& s : spec.series) {
        for (double v : {s.ci_low, s.ci_high, s.point}) {
            if (!std::isfinite(v)) throw PreconditionError("render_ci_chart: non-finite value in series " + s.label);
            lo = std::min(lo, v * spec.scale);
            hi = std::max(hi, v * spec.scale);
        }
    }
    if (spec.reference_line) {
        lo = std::min(lo, *spec.reference_line);
        hi = std::max(hi, *spec.reference_line);
    }
    if (hi - lo < 1e-9) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double step = detail::nice_step(hi - lo);
    lay.y_min = std::floor(lo / step) * step;
    lay.y_max = std::ceil(hi / step) * step;
    if (lay.y_max - lay.y_min < step) lay.y_max = lay.y_min + step;
    for (double t = lay.y_min; t <= lay.y_max + step * 1e-9; t += step) lay.ticks.push_back(std::fabs(t) < step * 1e-9 ? 0.0 : t);

    const double slot = (lay.plot_right() - lay.plot_left()) / static_cast<double>(spec.series.size());
    for (std::size_t i = 0; i < spec.series.size(); ++i) {
        const auto& s = spec.series[i];
        lay.bars.push_back({lay.plot_left() + slot * (static_cast<double>(i) + 0.5), lay.to_pixel(s.point * spec.scale),
                            lay.to_pixel(s.ci_low * spec.scale), lay.to_pixel(s.ci_high * spec.scale)});
    }
    if (spec.reference_line) lay.reference_y = lay.to_pixel(*spec.reference_line);
    return lay;
}

/// True when the reference line passes through the error bar of series i.
inline bool reference_crosses(const CiChartSpec& spec, std::size_t i) {
    if (!spec.reference_line) return false;
    const auto& s = spec.series.at(i);
    return s.ci_low * spec.scale <= *spec.reference_line && *spec.reference_line <= s.ci_high * spec.scale;
}

inline std::string render_ci_chart(const CiChartSpec& spec) {
    const ChartLayout lay = layout_chart(spec);
    auto num = [](double v) { return fixed(v, 2); };
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << num(ChartLayout::kWidth) << ' '
        << num(ChartLayout::kHeight) << "\" width=\"" << num(ChartLayout::kWidth) << "\" height=\""
        << num(ChartLayout::kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<title>" << detail::xml_escape(spec.title) << "</title>\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << num(ChartLayout::kWidth) << "\" height=\"" << num(ChartLayout::kHeight)
        << "\" fill=\"white\"/>\n";
    svg << "<text class=\"chart-title\" x=\"" << num(ChartLayout::kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << detail::xml_escape(spec.title) << "</text>\n";

    // Axes and y ticks.
    svg << "<line class=\"axis\" x1=\"" << num(lay.plot_left()) << "\" y1=\"" << num(lay.plot_top()) << "\" x2=\""
        << num(lay.plot_left()) << "\" y2=\"" << num(lay.plot_bottom()) << "\" stroke=\"black\"/>\n";
    svg << "<line class=\"axis\" x1=\"" << num(lay.plot_left()) << "\" y1=\"" << num(lay.plot_bottom()) << "\" x2=\""
        << num(lay.plot_right()) << "\" y2=\"" << num(lay.plot_bottom()) << "\" stroke=\"black\"/>\n";
    for (double t : lay.ticks) {
        const double y = lay.to_pixel(t);
        svg << "<line class=\"tick\" x1=\"" << num(lay.plot_left() - 5) << "\" y1=\"" << num(y) << "\" x2=\""
            << num(lay.plot_left()) << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
        svg << "<text class=\"tick-label\" x=\"" << num(lay.plot_left() - 8) << "\" y=\"" << num(y + 4)
            << "\" text-anchor=\"end\">" << fixed(t, std::fabs(t - std::round(t)) < 1e-9 ? 0 : 2) << "</text>\n";
    }
    svg << "<text class=\"axis-label\" x=\"" << num((lay.plot_left() + lay.plot_right()) / 2) << "\" y=\""
        << num(ChartLayout::kHeight - 15) << "\" text-anchor=\"middle\">" << detail::xml_escape(spec.x_label)
        << "</text>\n";
    svg << "<text class=\"axis-label\" x=\"18\" y=\"" << num((lay.plot_top() + lay.plot_bottom()) / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << num((lay.plot_top() + lay.plot_bottom()) / 2)
        << ")\">" << detail::xml_escape(spec.y_label) << "</text>\n";

    if (lay.reference_y) {
        svg << "<line class=\"reference-line\" x1=\"" << num(lay.plot_left()) << "\" y1=\"" << num(*lay.reference_y)
            << "\" x2=\"" << num(lay.plot_right()) << "\" y2=\"" << num(*lay.reference_y)
            << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
    }

    for (std::size_t i = 0; i < lay.bars.size(); ++i) {
        const auto& b = lay.bars[i];
        svg << "<g class=\"series\" data-label=\"" << detail::xml_escape(spec.series[i].label) << "\">\n";
        svg << "  <line class=\"ci-bar\" x1=\"" << num(b.x) << "\" y1=\"" << num(b.y_low) << "\" x2=\"" << num(b.x)
            << "\" y2=\"" << num(b.y_high) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
        for (double y : {b.y_low, b.y_high}) {
            svg << "  <line class=\"ci-cap\" x1=\"" << num(b.x - 8) << "\" y1=\"" << num(y) << "\" x2=\"" << num(b.x + 8)
                << "\" y2=\"" << num(y) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
        }
        svg << "  <circle class=\"ci-point\" cx=\"" << num(b.x) << "\" cy=\"" << num(b.y_point)
            << "\" r=\"4\" fill=\"black\"/>\n";
        svg << "  <text class=\"series-label\" x=\"" << num(b.x) << "\" y=\"" << num(lay.plot_bottom() + 18)
            << "\" text-anchor=\"middle\">" << detail::xml_escape(spec.series[i].label) << "</text>\n";
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace pctimpact::report

#endif
