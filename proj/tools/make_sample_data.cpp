// Writes a seeded three-institution sample CSV for trying out pct_impact.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pctimpact/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate a synthetic publication CSV"};
    std::string output;
    std::uint64_t seed = 2013;
    bool strip = false;
    app.add_option("output", output, "Output path (stdout when omitted)");
    app.add_option("--seed", seed, "Generator seed");
    app.add_flag("--citations-only", strip, "Omit the supplied percentile column");
    CLI11_PARSE(app, argc, argv);

    auto data = pctimpact::synthetic::paper_like_dataset(seed);
    if (strip) {
        auto records = data.records();
        for (auto& r : records) r.inv_percentile.reset();
        data = pctimpact::Dataset(std::move(records));
    }
    if (output.empty()) {
        pctimpact::write_records(std::cout, data);
        return 0;
    }
    std::ofstream out(output);
    if (!out) {
        std::cerr << "cannot write " << output << '\n';
        return 1;
    }
    pctimpact::write_records(out, data);
    return 0;
}
