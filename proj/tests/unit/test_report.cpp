#include <catch2/catch_amalgamated.hpp>

#include <regex>

#include "pctimpact/report.hpp"

using namespace pctimpact;
using namespace pctimpact::report;

namespace {

CiChartSpec figure_like() {
    return {"Average Percentile Score by Institution, with 95% CIs",
            "Institution",
            "Mean percentile",
            {{"Institution 1", 49.67, 45.99, 53.36}, {"Institution 2", 32.15, 29.85, 34.46}, {"Institution 3", 45.98, 43.37, 48.59}},
            50.0,
            1.0};
}

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

double attr(const std::string& element, const std::string& name) {
    const std::regex re(name + "=\"([-0-9.]+)\"");
    std::smatch m;
    REQUIRE(std::regex_search(element, m, re));
    return std::stod(m[1]);
}

} // namespace

TEST_CASE("cell formatting", "[report]") {
    CHECK(render({-0.17621, CellFormat::Fixed2, {}}) == "-0.18");
    CHECK(render({-0.001, CellFormat::Fixed2, {}}) == "0.00");
    CHECK(render({-0.6493, CellFormat::Fixed3, {}}) == "-0.649");
    CHECK(render({0.86027, CellFormat::PValue, {}}) == "0.8603");
    CHECK(render({3e-5, CellFormat::PValue, {}}) == "<.0001");
    CHECK(render({0.00005, CellFormat::PValue, {}}) == "0.0001");
    CHECK(render({549.0, CellFormat::Count, {}}) == "549");
    CHECK(render({std::nullopt, CellFormat::Fixed2, {}}) == "NA");
    CHECK(render({std::nan(""), CellFormat::Fixed2, {}}) == "NA");
    CHECK(render({std::nullopt, CellFormat::Text, "yes"}) == "yes");
}

TEST_CASE("TSV layout", "[report]") {
    ReportTable t;
    t.title = "Demo";
    t.columns = {"Institution A", "Institution B"};
    t.add_row("Mean", {{1.234, CellFormat::Fixed2, {}}, {5.0, CellFormat::Fixed2, {}}});
    t.add_row("N", {{10.0, CellFormat::Count, {}}, {std::nullopt, CellFormat::Count, {}}});
    t.footnotes.push_back("note");
    CHECK(t.to_tsv() ==
          "# Demo\nStatistical Measure\tInstitution A\tInstitution B\nMean\t1.23\t5.00\nN\t10\tNA\n# note\n");
    CHECK(t.at("N", 0).value == 10.0);
    CHECK_THROWS_AS(t.at("Median", 0), PreconditionError);
    CHECK_THROWS_AS(t.add_row("Bad", {{1.0, CellFormat::Fixed2, {}}}), PreconditionError);
}

TEST_CASE("chart rendering is deterministic", "[report][svg]") {
    const auto spec = figure_like();
    CHECK(render_ci_chart(spec) == render_ci_chart(spec));
}

TEST_CASE("chart structure", "[report][svg]") {
    const auto spec = figure_like();
    const auto svg = render_ci_chart(spec);
    CHECK(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0) == 0);
    CHECK(svg.ends_with("</svg>\n"));
    CHECK(count(svg, "class=\"ci-bar\"") == 3);
    CHECK(count(svg, "class=\"ci-cap\"") == 6);
    CHECK(count(svg, "class=\"ci-point\"") == 3);
    CHECK(count(svg, "class=\"reference-line\"") == 1);
    CHECK(count(svg, "stroke-dasharray=\"6 4\"") == 1);
    CHECK(svg.find("data-label=\"Institution 2\"") != std::string::npos);
    CHECK(count(svg, "<g ") == count(svg, "</g>"));
}

TEST_CASE("bar geometry follows the data", "[report][svg]") {
    const auto spec = figure_like();
    const auto lay = layout_chart(spec);
    REQUIRE(lay.bars.size() == 3);
    CHECK(lay.y_min <= 29.85);
    CHECK(lay.y_max >= 53.36);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& b = lay.bars[i];
        CHECK(b.y_high < b.y_point);  // higher values are drawn higher up
        CHECK(b.y_point < b.y_low);
        if (i) CHECK(b.x > lay.bars[i - 1].x);
    }
    REQUIRE(lay.reference_y);
    CHECK(reference_crosses(spec, 0));
    CHECK_FALSE(reference_crosses(spec, 1));
    CHECK_FALSE(reference_crosses(spec, 2));
    // Crossing in data space is crossing in pixel space.
    CHECK(lay.bars[0].y_high <= *lay.reference_y);
    CHECK(*lay.reference_y <= lay.bars[0].y_low);
    CHECK(*lay.reference_y < lay.bars[2].y_high);

    const auto svg = render_ci_chart(spec);
    const auto pos = svg.find("class=\"reference-line\"");
    const auto line = svg.substr(pos, svg.find("/>", pos) - pos);
    CHECK(std::fabs(attr(line, "y1") - *lay.reference_y) < 0.01);
}

TEST_CASE("proportion charts scale into percentage points", "[report][svg]") {
    CiChartSpec spec{"Shares", "Institution", "PP", {{"A", 0.1119, 0.0742, 0.1497}, {"B", 0.2914, 0.2534, 0.3295}}, 10.0,
                     100.0};
    const auto lay = layout_chart(spec);
    CHECK(lay.y_max >= 32.95);
    CHECK(reference_crosses(spec, 0));
    CHECK_FALSE(reference_crosses(spec, 1));
}

TEST_CASE("labels are escaped and bad input rejected", "[report][svg]") {
    CiChartSpec spec{"A & B <test>", "x", "y", {{"R&D \"lab\"", 1.0, 0.0, 2.0}}, std::nullopt, 1.0};
    const auto svg = render_ci_chart(spec);
    CHECK(svg.find("A &amp; B &lt;test&gt;") != std::string::npos);
    CHECK(svg.find("data-label=\"R&amp;D &quot;lab&quot;\"") != std::string::npos);
    CHECK(svg.find("reference-line") == std::string::npos);

    spec.series.clear();
    CHECK_THROWS_AS(render_ci_chart(spec), PreconditionError);
    spec.series.push_back({"nan", std::nan(""), 0.0, 1.0});
    CHECK_THROWS_AS(render_ci_chart(spec), PreconditionError);
}

TEST_CASE("a zero-width interval still renders", "[report][svg]") {
    CiChartSpec spec{"flat", "x", "y", {{"A", 5.0, 5.0, 5.0}}, std::nullopt, 1.0};
    const auto lay = layout_chart(spec);
    CHECK(lay.y_max > lay.y_min);
    CHECK(lay.bars[0].y_low == lay.bars[0].y_high);
}
