// pct_impact: percentile-based impact indicators with effect sizes and tests.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "pctimpact/analysis.hpp"

namespace fs = std::filesystem;
using namespace pctimpact;
using namespace pctimpact::analysis;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitConfig = 2;

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << content;
}

void emit(const CommandOutput& out, const AnalysisInput& in, const AnalysisConfig& config) {
    for (const auto& line : out.log) std::cerr << line << '\n';
    const bool tsv = config.formats.contains(OutputFormat::Tsv);
    const bool json = config.formats.contains(OutputFormat::Json);
    const bool svg = config.formats.contains(OutputFormat::Svg);

    if (config.out_dir.empty()) {
        if (tsv) {
            if (out.csv) std::cout << *out.csv;
            for (const auto& t : out.tables) std::cout << t.to_tsv();
        }
        if (json) std::cout << out.json.dump(2) << '\n';
        if (svg && out.svg) std::cerr << "note: SVG output needs --out-dir\n";
        return;
    }

    const fs::path dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + config.out_dir + "': " + ec.message());
    if (tsv) {
        if (out.csv) write_file(dir / out.csv_name, *out.csv);
        std::string text;
        for (const auto& t : out.tables) text += t.to_tsv();
        if (!text.empty()) write_file(dir / (out.name + ".tsv"), text);
    }
    if (json) write_file(dir / (out.name + ".json"), out.json.dump(2) + "\n");
    if (svg && out.svg) write_file(dir / out.svg_name, *out.svg);
    if (!in.rejects.empty()) {
        std::ofstream rej(dir / "rejects.csv");
        write_rejects(rej, in.rejects);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Percentile-based citation impact: normalization, top-x shares, effect sizes and tests"};
    app.set_config("--config", "", "key=value configuration file (command-line flags take precedence)");
    app.require_subcommand(1);
    app.fallthrough();

    AnalysisConfig config;
    std::string scheme = "common";
    std::string counting = "binary";
    std::string ci_method = "normal";
    std::string pairs;
    std::string formats = "tsv";
    int last_year = 0;

    app.add_option("-i,--input", config.input, "Publication CSV");
    app.add_option("--scheme", scheme, "Percentile formula")->check(CLI::IsMember({"common", "incites"}));
    app.add_flag("--inverted", config.scheme.inverted, "Rank in descending citation order (lower is better)");
    app.add_flag("--zero-adjust", config.scheme.zero_rank_adjust, "Pin zero-cited papers to the worst percentile");
    app.add_option("--mu0", config.mu0, "Null mean percentile for one-sample tests");
    app.add_option("--top-x", config.top_x, "Top-x% threshold");
    app.add_option("--p0", config.p0, "Null top-x share");
    app.add_option("--ci-level", config.ci_level, "Confidence level");
    app.add_option("--pairs", pairs, "Institution pairs a:b[,c:d]");
    app.add_option("--counting", counting, "Top-x counting")->check(CLI::IsMember({"binary", "fractional"}));
    app.add_option("--bootstrap-reps", config.bootstrap.replicates, "Bootstrap replicates");
    app.add_option("--seed", config.bootstrap.seed, "Bootstrap master seed")->envname("PCT_IMPACT_SEED");
    app.add_option("--ci", ci_method, "Bootstrap interval method")->check(CLI::IsMember({"normal", "percentile"}));
    app.add_option("--threads", config.bootstrap.threads, "Bootstrap worker threads");
    app.add_flag("--welch", config.welch, "Add Welch rows to compare");
    app.add_flag("--mann-whitney", config.mann_whitney, "Add Mann-Whitney rows to compare");
    app.add_option("--last-year", last_year, "Drop publications after this year");
    app.add_option("--max-reject-fraction", config.ingestion.max_reject_fraction,
                   "Abort when more rows than this fraction are rejected");
    app.add_option("-o,--out-dir", config.out_dir, "Write outputs into this directory");
    app.add_option("--format", formats, "Comma-separated output formats: tsv,json,svg");

    const std::map<std::string, CommandOutput (*)(const AnalysisInput&, const AnalysisConfig&)> commands{
        {"percentiles", cmd_percentiles}, {"summary", cmd_summary},       {"compare", cmd_compare},
        {"topshare", cmd_topshare},       {"topcompare", cmd_topcompare}, {"robustness", cmd_robustness},
        {"bootstrap", cmd_bootstrap},
    };
    const std::map<std::string, std::string> help{
        {"percentiles", "Per-paper percentile ranks"},
        {"summary", "Mean percentile per institution against mu0"},
        {"compare", "Pairwise differences in mean percentile"},
        {"topshare", "Top-x share per institution against p0"},
        {"topcompare", "Pairwise differences in top-x share"},
        {"robustness", "MNCS versus top-x share without the most-cited paper"},
        {"bootstrap", "Bootstrap intervals for means and shares"},
    };
    for (const auto& [name, fn] : commands) app.add_subcommand(name, help.at(name));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        config.scheme.formula = scheme == "incites" ? PercentileFormula::InCites : PercentileFormula::Common;
        config.counting = counting == "fractional" ? Counting::Fractional : Counting::Binary;
        config.bootstrap.ci_method = ci_method == "percentile" ? resample::CiMethod::Percentile
                                                               : resample::CiMethod::NormalApprox;
        if (!pairs.empty()) config.pairs = parse_pairs(pairs);
        config.formats = parse_formats(formats);
        if (last_year != 0) config.last_year = last_year;
        config.validate();

        const auto name = app.get_subcommands().front()->get_name();
        const auto input = load(config);
        emit(commands.at(name)(input, config), input, config);
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }
}
