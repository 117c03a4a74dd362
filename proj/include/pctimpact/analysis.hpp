#ifndef PCTIMPACT_ANALYSIS_HPP
#define PCTIMPACT_ANALYSIS_HPP

// Command orchestration: ingestion -> percentiles -> statistics -> report
// tables, JSON documents, and charts. The CLI in tools/ is a thin shell
// around these functions.

#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pctimpact/citation_data.hpp"
#include "pctimpact/effect_stats.hpp"
#include "pctimpact/errors.hpp"
#include "pctimpact/percentile.hpp"
#include "pctimpact/report.hpp"
#include "pctimpact/resampling.hpp"

namespace pctimpact::analysis {

using Json = nlohmann::ordered_json;
using InstitutionPair = std::pair<std::string, std::string>;

enum class OutputFormat { Tsv, Json, Svg };

struct AnalysisConfig {
    std::string input;
    PercentileScheme scheme;
    double mu0 = 50.0;
    double top_x = 10.0;
    double p0 = 0.10;
    double ci_level = 0.95;
    Counting counting = Counting::Binary;
    resample::BootstrapSpec bootstrap;
    bool welch = false;
    bool mann_whitney = false;
    std::vector<InstitutionPair> pairs;  // empty: every pair in label order
    std::optional<int> last_year;
    IngestionConfig ingestion;
    std::string out_dir;
    std::set<OutputFormat> formats{OutputFormat::Tsv};

    void validate() const {
        if (!(mu0 >= 0.0 && mu0 <= 100.0)) throw ConfigError("--mu0 must lie in [0, 100]");
        if (!(top_x > 0.0 && top_x < 100.0)) throw ConfigError("--top-x must lie in (0, 100)");
        if (!(p0 > 0.0 && p0 < 1.0)) throw ConfigError("--p0 must lie in (0, 1)");
        if (!(ci_level > 0.0 && ci_level < 1.0)) throw ConfigError("confidence level must lie in (0, 1)");
        if (bootstrap.replicates < 1) throw ConfigError("--bootstrap-reps must be >= 1");
        if (!(ingestion.max_reject_fraction >= 0.0 && ingestion.max_reject_fraction <= 1.0))
            throw ConfigError("reject threshold must lie in [0, 1]");
    }
};

/// Parses "a:b[,c:d...]".
inline std::vector<InstitutionPair> parse_pairs(std::string_view text) {
    std::vector<InstitutionPair> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = csv::trim(text.substr(0, comma));
        const auto colon = item.find(':');
        if (colon == std::string_view::npos || colon == 0 || colon + 1 == item.size())
            throw ConfigError("malformed pair '" + std::string(item) + "', expected a:b");
        out.emplace_back(std::string(item.substr(0, colon)), std::string(item.substr(colon + 1)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    if (out.empty()) throw ConfigError("--pairs is empty");
    return out;
}

inline std::set<OutputFormat> parse_formats(std::string_view text) {
    std::set<OutputFormat> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = csv::trim(text.substr(0, comma));
        if (item == "tsv") out.insert(OutputFormat::Tsv);
        else if (item == "json") out.insert(OutputFormat::Json);
        else if (item == "svg") out.insert(OutputFormat::Svg);
        else throw ConfigError("unknown output format '" + std::string(item) + "'");
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    if (out.empty()) throw ConfigError("--format is empty");
    return out;
}

/// A dataset prepared for analysis. Percentiles are either supplied in the
/// input (InCites-style export; fractional counting unavailable) or computed
/// from the reference sets the input itself forms.
struct AnalysisInput {
    Dataset dataset;
    std::vector<RejectedRow> rejects;
    bool supplied_percentiles = false;
    Dataset scored;      // percentile per paper under the active scheme
    Dataset top_scored;  // inverted percentile per paper for top-x classification
    std::optional<TopWeights> weights;
};

inline AnalysisInput prepare(Dataset d, const AnalysisConfig& config, std::vector<RejectedRow> rejects = {}) {
    if (config.last_year) d = filter_years(d, *config.last_year);
    AnalysisInput in;
    in.rejects = std::move(rejects);
    in.supplied_percentiles = d.has_supplied_percentiles();
    if (in.supplied_percentiles) {
        in.scored = d;
        in.top_scored = d;
    } else {
        in.scored = with_percentiles(d, normalize_dataset(d, config.scheme, config.top_x));
        PercentileScheme inverted = config.scheme;
        inverted.inverted = true;
        const auto top = normalize_dataset(d, inverted, config.top_x);
        in.top_scored = with_percentiles(d, top);
        in.weights = top_weights(top);
    }
    in.dataset = std::move(d);
    return in;
}

inline AnalysisInput load(const AnalysisConfig& config) {
    if (config.input.empty()) throw ConfigError("--input is required");
    std::ifstream file(config.input);
    if (!file) throw ConfigError("cannot open input file '" + config.input + "'");
    auto parsed = parse_records(file, config.ingestion);
    return prepare(std::move(parsed.dataset), config, std::move(parsed.rejects));
}

struct CommandOutput {
    std::string name;
    std::vector<report::ReportTable> tables;
    Json json;
    std::optional<std::string> svg;
    std::string svg_name;
    std::optional<std::string> csv;
    std::string csv_name;
    std::vector<std::string> log;  // informational lines and warnings
};

namespace detail {

inline std::string pct_label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

inline std::string level_label(double level) { return pct_label(level * 100.0) + "%"; }

inline std::string top_label(double x) { return "PP_top" + pct_label(x) + "%"; }

inline std::vector<double> percentiles_of(const Dataset& scored, const std::string& institution) {
    std::vector<double> v;
    for (const auto& r : select_institution_sample(scored, institution).records) v.push_back(*r.inv_percentile);
    return v;
}

inline std::vector<double> top_indicators(const Dataset& top_scored, const std::string& institution, double x) {
    std::vector<double> v;
    for (const auto& r : select_institution_sample(top_scored, institution).records)
        v.push_back(classify_top_x(*r.inv_percentile, x));
    return v;
}

inline std::vector<InstitutionPair> resolve_pairs(const AnalysisInput& in, const AnalysisConfig& config) {
    if (!config.pairs.empty()) {
        for (const auto& [a, b] : config.pairs) {
            for (const auto& label : {a, b})
                if (!in.dataset.institutions().contains(label)) select_institution_sample(in.dataset, label);
        }
        return config.pairs;
    }
    std::vector<InstitutionPair> all;
    const std::vector<std::string> labels(in.dataset.institutions().begin(), in.dataset.institutions().end());
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = i + 1; j < labels.size(); ++j) all.emplace_back(labels[i], labels[j]);
    if (all.empty()) throw ConfigError("comparisons need at least two institutions");
    return all;
}

inline std::string pair_label(const InstitutionPair& p) { return "Institution " + p.first + " Vs Institution " + p.second; }

inline Json number_or_null(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? Json(*v) : Json(nullptr);
}

inline report::Cell num(double v, report::CellFormat f = report::CellFormat::Fixed2) { return {v, f, {}}; }
inline report::Cell undefined() { return {std::nullopt, report::CellFormat::Fixed2, {}}; }
inline report::Cell text(std::string s) { return {std::nullopt, report::CellFormat::Text, std::move(s)}; }

inline double top_share(const AnalysisInput& in, const AnalysisConfig& config, const std::string& institution) {
    const auto sample = select_institution_sample(in.top_scored, institution);
    const auto* weights = in.weights ? &*in.weights : nullptr;
    return institution_top_share(sample, config.top_x, config.counting, weights).share;
}

inline void require_fractional_support(const AnalysisInput& in, const AnalysisConfig& config) {
    if (config.counting == Counting::Fractional && !in.weights)
        throw CapabilityError(
            "fractional counting needs complete reference sets; the input supplies percentiles instead");
}

} // namespace detail

inline CommandOutput cmd_percentiles(const AnalysisInput& in, const AnalysisConfig& config) {
    CommandOutput out;
    out.name = "percentiles";
    out.csv_name = "percentiles.csv";
    const auto papers = normalize_dataset(in.dataset, config.scheme, config.top_x);

    for (const auto& set : group_reference_sets(in.dataset)) {
        std::map<std::int64_t, std::size_t> counts;
        for (const auto& m : set.members) ++counts[m.citations];
        const auto tied = std::count_if(counts.begin(), counts.end(), [](const auto& kv) { return kv.second > 1; });
        out.log.push_back("reference set " + set.key.label() + ": n=" + std::to_string(set.members.size()) +
                          ", tie groups=" + std::to_string(tied));
    }

    std::string csv_text = "paper_id,reference_set,rank,percentile,tie_group_size,top_x_weight\n";
    Json rows = Json::array();
    for (const auto& p : papers) {
        csv_text += csv::quote(p.paper_id) + ',' + csv::quote(p.reference_set) + ',' + std::to_string(p.rank) + ',' +
                    report::fixed(p.percentile, 6) + ',' + std::to_string(p.tie_group_size) + ',' +
                    report::fixed(p.top_x_weight, 6) + '\n';
        rows.push_back({{"paper_id", p.paper_id},
                        {"institution", p.institution},
                        {"reference_set", p.reference_set},
                        {"rank", p.rank},
                        {"percentile", p.percentile},
                        {"tie_group_size", p.tie_group_size},
                        {"top_x_weight", p.top_x_weight}});
    }
    out.csv = std::move(csv_text);
    out.json = {{"command", "percentiles"},
                {"scheme",
                 {{"formula", config.scheme.formula == PercentileFormula::Common ? "common" : "incites"},
                  {"inverted", config.scheme.inverted},
                  {"zero_adjust", config.scheme.zero_rank_adjust}}},
                {"top_x", config.top_x},
                {"papers", std::move(rows)}};
    return out;
}

/// Mean percentile per institution tested against mu0.
inline CommandOutput cmd_summary(const AnalysisInput& in, const AnalysisConfig& config) {
    using report::CellFormat;
    CommandOutput out;
    out.name = "summary";
    out.svg_name = "figure1.svg";
    report::ReportTable t;
    t.title = "Effect sizes and significance tests using mean percentile rankings";
    const std::vector<std::string> labels(in.dataset.institutions().begin(), in.dataset.institutions().end());
    for (const auto& l : labels) t.columns.push_back("Institution " + l);

    const std::string lvl = detail::level_label(config.ci_level);
    std::vector<std::vector<report::Cell>> rows(9);
    Json items = Json::array();
    report::CiChartSpec chart{"Average Percentile Score by Institution, with " + lvl + " CIs", "Institution",
                              "Mean percentile", {}, config.mu0, 1.0};

    for (const auto& label : labels) {
        const auto values = detail::percentiles_of(in.scored, label);
        const auto s = stats::summarize(values);
        Json item{{"institution", label}, {"n", s.n}, {"mean", s.mean}, {"sd", detail::number_or_null(s.sd)},
                  {"se", detail::number_or_null(s.se)}};
        std::optional<stats::MeanTestResult> r;
        if (s.n >= 2 && s.sd && *s.sd > 0.0) {
            r = stats::one_sample_t(s, config.mu0, config.ci_level);
        } else {
            out.log.push_back("warning: institution " + label + " has n < 2 or zero spread; statistics undefined");
        }
        rows[0].push_back(detail::num(s.mean));
        rows[1].push_back(s.sd ? detail::num(*s.sd) : detail::undefined());
        rows[2].push_back(s.se ? detail::num(*s.se) : detail::undefined());
        rows[3].push_back(r ? detail::num(r->ci_low) : detail::undefined());
        rows[4].push_back(r ? detail::num(r->ci_high) : detail::undefined());
        rows[5].push_back(r ? detail::num(r->t) : detail::undefined());
        rows[6].push_back(detail::num(static_cast<double>(s.n), CellFormat::Count));
        rows[7].push_back(r ? detail::num(r->p, CellFormat::PValue) : detail::undefined());
        rows[8].push_back(r ? detail::num(r->d, CellFormat::Fixed3) : detail::undefined());
        if (r) {
            item.update(Json{{"t", r->t}, {"df", r->df}, {"p", r->p}, {"ci_low", r->ci_low}, {"ci_high", r->ci_high},
                             {"d", r->d}, {"magnitude", stats::to_string(r->magnitude)}, {"method", r->method}});
            chart.series.push_back({"Institution " + label, s.mean, r->ci_low, r->ci_high});
        }
        items.push_back(std::move(item));
    }
    const std::vector<std::string> names{"Mean",
                                         "Standard Deviation",
                                         "Standard Error of the Mean",
                                         "Lower bound of the " + lvl + " CI",
                                         "Upper bound of the " + lvl + " CI",
                                         "T (for test of mu = " + detail::pct_label(config.mu0) + ")",
                                         "N",
                                         "P value (two-tailed test)",
                                         "Cohen's d"};
    for (std::size_t i = 0; i < names.size(); ++i) t.add_row(names[i], std::move(rows[i]));
    out.tables.push_back(std::move(t));
    out.json = {{"command", "summary"}, {"mu0", config.mu0}, {"ci_level", config.ci_level}, {"institutions", items}};
    if (!chart.series.empty()) out.svg = report::render_ci_chart(chart);
    return out;
}

/// Pairwise mean differences, statistic(a) - statistic(b) per pair (a, b).
inline CommandOutput cmd_compare(const AnalysisInput& in, const AnalysisConfig& config) {
    using report::CellFormat;
    CommandOutput out;
    out.name = "compare";
    out.svg_name = "figure2.svg";
    const auto pairs = detail::resolve_pairs(in, config);
    report::ReportTable t;
    t.title = "Effect sizes and significance tests for differences in percentile rankings";
    for (const auto& p : pairs) t.columns.push_back(detail::pair_label(p));

    const std::string lvl = detail::level_label(config.ci_level);
    std::vector<std::string> names{"Difference between Means",
                                   "Standard Deviation (pooled)",
                                   "Standard Error of the Mean Difference",
                                   "Lower bound of the " + lvl + " CI for the difference",
                                   "Upper bound of the " + lvl + " CI for the difference",
                                   "T (for test of means are equal)",
                                   "P value (two-tailed test)",
                                   "Cohen's d"};
    if (config.welch) names.insert(names.end(), {"Welch T", "Welch df", "Welch P value"});
    if (config.mann_whitney) names.insert(names.end(), {"Mann-Whitney z", "Mann-Whitney P value"});
    std::vector<std::vector<report::Cell>> rows(names.size());
    Json items = Json::array();
    report::CiChartSpec chart{"Differences in Mean Percentile Rankings with " + lvl + " CIs", "Pairing",
                              "Difference in mean percentile", {}, 0.0, 1.0};

    for (const auto& pair : pairs) {
        const auto a = detail::percentiles_of(in.scored, pair.first);
        const auto b = detail::percentiles_of(in.scored, pair.second);
        if (a.size() < 2 || b.size() < 2)
            throw DataError("pair " + pair.first + ":" + pair.second + " needs n >= 2 in both groups");
        const auto sa = stats::summarize(a);
        const auto sb = stats::summarize(b);
        const auto r = stats::two_sample_pooled_t(sa, sb, config.ci_level);
        std::size_t k = 0;
        rows[k++].push_back(detail::num(r.estimate));
        rows[k++].push_back(detail::num(*r.pooled_sd));
        rows[k++].push_back(detail::num(r.se));
        rows[k++].push_back(detail::num(r.ci_low));
        rows[k++].push_back(detail::num(r.ci_high));
        rows[k++].push_back(detail::num(r.t));
        rows[k++].push_back(detail::num(r.p, CellFormat::PValue));
        rows[k++].push_back(detail::num(r.d, CellFormat::Fixed3));
        Json item{{"pair", {pair.first, pair.second}}, {"n1", sa.n},          {"n2", sb.n},
                  {"diff", r.estimate},                {"pooled_sd", *r.pooled_sd}, {"se", r.se},
                  {"t", r.t},                          {"df", r.df},        {"p", r.p},
                  {"ci_low", r.ci_low},                {"ci_high", r.ci_high}, {"d", r.d},
                  {"magnitude", stats::to_string(r.magnitude)}, {"method", r.method}};
        if (config.welch) {
            const auto w = stats::two_sample_welch_t(sa, sb, config.ci_level);
            rows[k++].push_back(detail::num(w.t));
            rows[k++].push_back(detail::num(w.df));
            rows[k++].push_back(detail::num(w.p, CellFormat::PValue));
            item["welch"] = {{"t", w.t}, {"df", w.df}, {"p", w.p}, {"ci_low", w.ci_low}, {"ci_high", w.ci_high},
                             {"d", w.d}, {"method", w.method}};
        }
        if (config.mann_whitney) {
            const auto mw = resample::mann_whitney(a, b);
            rows[k++].push_back(detail::num(mw.z_approx));
            rows[k++].push_back(detail::num(mw.p_two_tailed, CellFormat::PValue));
            item["mann_whitney"] = {{"u", mw.u_statistic}, {"z", mw.z_approx}, {"p", mw.p_two_tailed},
                                    {"method", "rank-sum, tie-corrected normal approximation with continuity correction"}};
        }
        items.push_back(std::move(item));
        chart.series.push_back({pair.first + " vs " + pair.second, r.estimate, r.ci_low, r.ci_high});
    }
    for (std::size_t i = 0; i < names.size(); ++i) t.add_row(names[i], std::move(rows[i]));
    out.tables.push_back(std::move(t));
    out.json = {{"command", "compare"}, {"ci_level", config.ci_level}, {"pairs", items}};
    out.svg = report::render_ci_chart(chart);
    return out;
}

/// Top-x share per institution tested against p0. Shares print times 100.
inline CommandOutput cmd_topshare(const AnalysisInput& in, const AnalysisConfig& config) {
    using report::CellFormat;
    detail::require_fractional_support(in, config);
    CommandOutput out;
    out.name = "topshare";
    out.svg_name = "figure3.svg";
    const std::string top = detail::top_label(config.top_x);
    const std::string lvl = detail::level_label(config.ci_level);
    const double z_crit = stats::z_critical(config.ci_level);
    report::ReportTable t;
    t.title = "Effect sizes and significance tests for " + top + " - individual institutions";
    const std::vector<std::string> labels(in.dataset.institutions().begin(), in.dataset.institutions().end());
    for (const auto& l : labels) t.columns.push_back("Institution " + l);

    std::vector<std::vector<report::Cell>> rows(8);
    Json items = Json::array();
    report::CiChartSpec chart{top + " by Institution, with " + lvl + " CIs", "Institution", top, {}, config.p0 * 100.0,
                              100.0};
    for (const auto& label : labels) {
        const double share = detail::top_share(in, config, label);
        const auto n = select_institution_sample(in.dataset, label).n();
        const auto r = stats::one_sample_prop_z_share(share, n, config.p0, z_crit);
        rows[0].push_back(detail::num(100.0 * r.estimate));
        rows[1].push_back(detail::num(100.0 * r.se));
        rows[2].push_back(detail::num(100.0 * r.ci_low));
        rows[3].push_back(detail::num(100.0 * r.ci_high));
        rows[4].push_back(detail::num(r.z));
        rows[5].push_back(detail::num(r.p, CellFormat::PValue));
        rows[6].push_back(detail::num(r.h, CellFormat::Fixed3));
        rows[7].push_back(detail::num(static_cast<double>(n), CellFormat::Count));
        items.push_back({{"institution", label}, {"n", n}, {"share", r.estimate}, {"se", r.se}, {"z", r.z},
                         {"p", r.p}, {"ci_low", r.ci_low}, {"ci_high", r.ci_high}, {"h", r.h},
                         {"magnitude", stats::to_string(r.magnitude)}, {"method", r.method}});
        chart.series.push_back({"Institution " + label, r.estimate, r.ci_low, r.ci_high});
    }
    const std::vector<std::string> names{top + "*",
                                         "Standard Error*",
                                         "Lower bound of the " + lvl + " CI*",
                                         "Upper bound of the " + lvl + " CI*",
                                         "Z (for test of " + top + " = " + report::fixed(config.p0, 2) + ")",
                                         "P value (two-tailed test)",
                                         "Cohen's h",
                                         "N"};
    for (std::size_t i = 0; i < names.size(); ++i) t.add_row(names[i], std::move(rows[i]));
    t.footnotes.push_back("* Numbers are multiplied by 100 to convert them into percentages");
    t.footnotes.push_back(std::string("Counting: ") + (config.counting == Counting::Binary ? "binary" : "fractional"));
    out.tables.push_back(std::move(t));
    out.json = {{"command", "topshare"},
                {"top_x", config.top_x},
                {"p0", config.p0},
                {"counting", config.counting == Counting::Binary ? "binary" : "fractional"},
                {"institutions", items}};
    out.svg = report::render_ci_chart(chart);
    return out;
}

inline CommandOutput cmd_topcompare(const AnalysisInput& in, const AnalysisConfig& config) {
    using report::CellFormat;
    detail::require_fractional_support(in, config);
    CommandOutput out;
    out.name = "topcompare";
    const auto pairs = detail::resolve_pairs(in, config);
    const std::string top = detail::top_label(config.top_x);
    const std::string lvl = detail::level_label(config.ci_level);
    const double z_crit = stats::z_critical(config.ci_level);
    report::ReportTable t;
    t.title = "Effect sizes and significance tests for differences in " + top + " across institutions";
    for (const auto& p : pairs) t.columns.push_back(detail::pair_label(p));
    std::vector<std::vector<report::Cell>> rows(7);
    Json items = Json::array();
    for (const auto& pair : pairs) {
        const auto n1 = select_institution_sample(in.dataset, pair.first).n();
        const auto n2 = select_institution_sample(in.dataset, pair.second).n();
        const auto r = stats::two_sample_prop_z_share(detail::top_share(in, config, pair.first), n1,
                                                      detail::top_share(in, config, pair.second), n2, z_crit);
        rows[0].push_back(detail::num(100.0 * r.estimate));
        rows[1].push_back(detail::num(100.0 * r.se));
        rows[2].push_back(detail::num(100.0 * r.ci_low));
        rows[3].push_back(detail::num(100.0 * r.ci_high));
        rows[4].push_back(detail::num(r.z));
        rows[5].push_back(detail::num(r.h, CellFormat::Fixed3));
        rows[6].push_back(detail::num(r.p, CellFormat::PValue));
        items.push_back({{"pair", {pair.first, pair.second}}, {"n1", n1}, {"n2", n2}, {"diff", r.estimate},
                         {"se", r.se}, {"se_pooled", r.se_test}, {"z", r.z}, {"p", r.p}, {"ci_low", r.ci_low},
                         {"ci_high", r.ci_high}, {"h", r.h}, {"magnitude", stats::to_string(r.magnitude)},
                         {"method", r.method}});
    }
    const std::vector<std::string> names{"Difference between proportions*",
                                         "Standard Error*",
                                         "Lower bound of the " + lvl + " CI for the difference*",
                                         "Upper bound of the " + lvl + " CI for the difference*",
                                         "Z (for test of " + top + " are equal)",
                                         "Cohen's h",
                                         "P value (two-tailed test)"};
    for (std::size_t i = 0; i < names.size(); ++i) t.add_row(names[i], std::move(rows[i]));
    t.footnotes.push_back("* Numbers are multiplied by 100 to convert them into percentages");
    out.tables.push_back(std::move(t));
    out.json = {{"command", "topcompare"},
                {"top_x", config.top_x},
                {"counting", config.counting == Counting::Binary ? "binary" : "fractional"},
                {"pairs", items}};
    return out;
}

/// MNCS and fractional top-x share with and without each institution's most
/// cited paper. Reference sets are the ones the input forms.
inline CommandOutput cmd_robustness(const AnalysisInput& in, const AnalysisConfig& config) {
    using report::CellFormat;
    CommandOutput out;
    out.name = "robustness";
    const std::string top = detail::top_label(config.top_x);
    PercentileScheme inverted = config.scheme;
    inverted.inverted = true;
    const auto papers = normalize_dataset(in.dataset, inverted, config.top_x);

    report::ReportTable t;
    t.title = "Outlier sensitivity: MNCS versus fractional " + top;
    std::vector<std::vector<report::Cell>> rows(9);
    Json items = Json::array();
    for (const auto& label : in.dataset.institutions()) {
        std::vector<ReferencedPaper> sample;
        for (const auto& p : papers)
            if (p.institution == label) sample.push_back({p.citations, p.reference_mean, p.top_x_weight});
        if (sample.size() < 2) {
            out.log.push_back("warning: institution " + label + " skipped, fewer than two papers");
            continue;
        }
        OutlierReport rep;
        try {
            rep = outlier_sensitivity(sample);
        } catch (const DegenerateError& e) {
            out.log.push_back("warning: institution " + label + " skipped: " + e.what());
            continue;
        }
        t.columns.push_back("Institution " + label);
        rows[0].push_back(detail::num(rep.mncs_with));
        rows[1].push_back(detail::num(rep.mncs_without));
        rows[2].push_back(detail::num(100.0 * rep.mncs_rel_delta()));
        rows[3].push_back(detail::num(100.0 * rep.top_share_with));
        rows[4].push_back(detail::num(100.0 * rep.top_share_without));
        rows[5].push_back(detail::num(100.0 * rep.top_share_abs_delta()));
        rows[6].push_back(detail::num(static_cast<double>(rep.dropped_citations), CellFormat::Count));
        rows[7].push_back(detail::num(static_cast<double>(rep.n), CellFormat::Count));
        rows[8].push_back(detail::text(std::abs(rep.mncs_rel_delta()) > std::abs(rep.top_share_rel_delta())
                                           ? "MNCS"
                                           : top));
        items.push_back({{"institution", label},
                         {"n", rep.n},
                         {"dropped_citations", rep.dropped_citations},
                         {"mncs_with", rep.mncs_with},
                         {"mncs_without", rep.mncs_without},
                         {"mncs_abs_delta", rep.mncs_abs_delta()},
                         {"mncs_rel_delta", rep.mncs_rel_delta()},
                         {"top_share_with", rep.top_share_with},
                         {"top_share_without", rep.top_share_without},
                         {"top_share_abs_delta", rep.top_share_abs_delta()},
                         {"top_share_rel_delta", rep.top_share_rel_delta()}});
    }
    const std::vector<std::string> names{"MNCS (all papers)",
                                         "MNCS (without most-cited paper)",
                                         "MNCS relative change (%)",
                                         top + " fractional (all papers)*",
                                         top + " fractional (without most-cited paper)*",
                                         top + " change (points)",
                                         "Citations of the most-cited paper",
                                         "N",
                                         "More sensitive indicator"};
    for (std::size_t i = 0; i < names.size(); ++i) t.add_row(names[i], std::move(rows[i]));
    t.footnotes.push_back("* Numbers are multiplied by 100 to convert them into percentages");
    out.tables.push_back(std::move(t));
    out.json = {{"command", "robustness"}, {"top_x", config.top_x}, {"institutions", items}};
    return out;
}

/// Bootstrap double-check of the mean and top-x share per institution and of
/// their differences per pair.
inline CommandOutput cmd_bootstrap(const AnalysisInput& in, const AnalysisConfig& config) {
    using report::CellFormat;
    CommandOutput out;
    out.name = "bootstrap";
    auto spec = config.bootstrap;
    spec.level = config.ci_level;
    const std::string lvl = detail::level_label(config.ci_level);

    report::ReportTable t;
    t.title = "Bootstrap confidence intervals (" + std::to_string(spec.replicates) + " replicates, " +
              std::string(resample::to_string(spec.ci_method)) + " method)";
    std::vector<std::vector<report::Cell>> rows(6);
    Json items = Json::array();

    auto add = [&](const std::string& column, resample::Statistic stat, const std::vector<double>& a,
                   const std::vector<double>& b, double null_value, double scale, const Json& group) {
        if (a.size() < 2 || (!b.empty() && b.size() < 2)) {
            out.log.push_back("warning: " + column + " skipped, fewer than two papers");
            return;
        }
        const auto r = resample::bootstrap_statistic(a, b, stat, spec);
        if (r.degenerate) out.log.push_back("warning: " + column + " has no resampling variation");
        t.columns.push_back(column);
        rows[0].push_back(detail::num(scale * r.point));
        rows[1].push_back(detail::num(scale * r.se_boot));
        rows[2].push_back(detail::num(scale * r.ci_low));
        rows[3].push_back(detail::num(scale * r.ci_high));
        rows[4].push_back(detail::num(scale * null_value));
        rows[5].push_back(detail::text(r.excludes(null_value) ? "yes" : "no"));
        items.push_back({{"statistic", resample::to_string(stat)},
                         {"group", group},
                         {"point", r.point},
                         {"se_boot", r.se_boot},
                         {"ci_method", resample::to_string(spec.ci_method)},
                         {"ci_low", r.ci_low},
                         {"ci_high", r.ci_high},
                         {"replicates", r.replicates_used},
                         {"seed", spec.seed},
                         {"null_value", null_value},
                         {"excludes_null", r.excludes(null_value)}});
    };

    const std::string top = detail::top_label(config.top_x);
    for (const auto& label : in.dataset.institutions()) {
        add("Mean: " + label, resample::Statistic::Mean, detail::percentiles_of(in.scored, label), {}, config.mu0, 1.0,
            Json(label));
        add(top + ": " + label, resample::Statistic::Proportion,
            detail::top_indicators(in.top_scored, label, config.top_x), {}, config.p0, 100.0, Json(label));
    }
    if (in.dataset.institutions().size() >= 2) {
        for (const auto& pair : detail::resolve_pairs(in, config)) {
            const Json group = Json::array({pair.first, pair.second});
            add("Mean diff: " + pair.first + " vs " + pair.second, resample::Statistic::MeanDiff,
                detail::percentiles_of(in.scored, pair.first), detail::percentiles_of(in.scored, pair.second), 0.0,
                1.0, group);
            add(top + " diff: " + pair.first + " vs " + pair.second, resample::Statistic::PropDiff,
                detail::top_indicators(in.top_scored, pair.first, config.top_x),
                detail::top_indicators(in.top_scored, pair.second, config.top_x), 0.0, 100.0, group);
        }
    }
    const std::vector<std::string> names{"Point estimate",
                                         "Bootstrap SE",
                                         "Lower bound of the " + lvl + " CI",
                                         "Upper bound of the " + lvl + " CI",
                                         "Null value",
                                         "CI excludes null"};
    for (std::size_t i = 0; i < names.size(); ++i) t.add_row(names[i], std::move(rows[i]));
    t.footnotes.push_back("Proportions are multiplied by 100");
    out.tables.push_back(std::move(t));
    out.json = {{"command", "bootstrap"},
                {"replicates", spec.replicates},
                {"seed", spec.seed},
                {"ci_method", resample::to_string(spec.ci_method)},
                {"results", items}};
    return out;
}

} // namespace pctimpact::analysis

#endif
