#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "pctimpact/citation_data.hpp"

using namespace pctimpact;

namespace {

PublicationRecord rec(std::string id, std::string inst, int year, std::vector<std::string> cats, std::int64_t c) {
    PublicationRecord r;
    r.id = std::move(id);
    r.institution = std::move(inst);
    r.pub_year = year;
    r.categories = std::move(cats);
    r.citations = c;
    return r;
}

const char* kSmall =
    "id,institution,pub_year,category,citations\n"
    "A1,MIT,2001,PHYS_CM,12\n"
    "A2,MIT,2001,PHYS_CM|CHEM_PH,0\n"
    "A3,ETH,2002,CHEM_PH,7\n";

} // namespace

TEST_CASE("parses a well-formed file", "[data]") {
    const auto parsed = parse_records(std::string_view(kSmall));
    REQUIRE(parsed.dataset.size() == 3);
    CHECK(parsed.rejects.empty());
    CHECK(parsed.data_rows == 3);
    const auto& r = parsed.dataset.records()[1];
    CHECK(r.id == "A2");
    CHECK(r.categories == std::vector<std::string>{"PHYS_CM", "CHEM_PH"});
    CHECK(r.citations == 0);
    CHECK_FALSE(r.inv_percentile);
    CHECK(parsed.dataset.institutions() == std::set<std::string>{"ETH", "MIT"});
    CHECK(parsed.dataset.year_range() == std::pair{2001, 2002});
    CHECK_FALSE(parsed.dataset.has_supplied_percentiles());
}

TEST_CASE("column order, BOM, CRLF and quoting are tolerated", "[data]") {
    const std::string text =
        "\xEF\xBB\xBF" "citations,category,id,pub_year,institution\r\n"
        "4,\"MATH, APPLIED\",X1,1999,\"Univ \"\"A\"\"\"\r\n"
        "\r\n";
    const auto parsed = parse_records(text);
    REQUIRE(parsed.dataset.size() == 1);
    const auto& r = parsed.dataset.records().front();
    CHECK(r.institution == "Univ \"A\"");
    CHECK(r.categories == std::vector<std::string>{"MATH, APPLIED"});
    CHECK(r.citations == 4);
}

TEST_CASE("a missing required column is a configuration error", "[data]") {
    CHECK_THROWS_AS(parse_records(std::string_view("id,institution,pub_year,category\nA,B,2001,C\n")), ConfigError);
    CHECK_THROWS_AS(parse_records(std::string_view("")), ConfigError);
}

TEST_CASE("bad rows are rejected with their line numbers", "[data]") {
    std::string text = "id,institution,pub_year,category,citations\n";
    for (int i = 0; i < 30; ++i) text += "P" + std::to_string(i) + ",U,2001,C," + std::to_string(i) + "\n";
    text += "Q1,U,2001,C,-3\n";      // line 32
    text += "Q2,U,twenty,C,3\n";     // line 33
    text += "Q3,U,2001,,3\n";        // line 34
    const auto parsed = parse_records(text);
    CHECK(parsed.dataset.size() == 30);
    REQUIRE(parsed.rejects.size() == 3);
    CHECK(parsed.rejects[0].row == 32);
    CHECK(parsed.rejects[0].reason == "citations is negative");
    CHECK(parsed.rejects[1].row == 33);
    CHECK(parsed.rejects[2].row == 34);

    std::ostringstream out;
    write_rejects(out, parsed.rejects);
    CHECK(out.str().rfind("row,reason\n32,citations is negative\n", 0) == 0);
}

TEST_CASE("too many rejects abort the run", "[data]") {
    const std::string text =
        "id,institution,pub_year,category,citations\n"
        "A,U,2001,C,1\n"
        "B,U,2001,C,x\n";
    CHECK_THROWS_AS(parse_records(text), DataError);
    IngestionConfig lenient;
    lenient.max_reject_fraction = 0.5;
    CHECK(parse_records(text, lenient).dataset.size() == 1);
}

TEST_CASE("a file without valid rows is an empty dataset", "[data]") {
    CHECK_THROWS_AS(parse_records(std::string_view("id,institution,pub_year,category,citations\n")),
                    EmptyDatasetError);
}

TEST_CASE("repeated ids merge categories and keep the best percentile", "[data]") {
    const std::string text =
        "id,institution,pub_year,category,citations,inv_percentile\n"
        "A,U,2001,PHYS,5,40\n"
        "A,U,2001,CHEM,5,12.5\n"
        "B,U,2001,PHYS,2,70\n";
    const auto parsed = parse_records(text);
    REQUIRE(parsed.dataset.size() == 2);
    const auto& a = parsed.dataset.records().front();
    CHECK(a.categories == std::vector<std::string>{"PHYS", "CHEM"});
    CHECK(*a.inv_percentile == 12.5);
    CHECK(parsed.dataset.has_supplied_percentiles());

    const std::string conflict =
        "id,institution,pub_year,category,citations\n"
        "A,U,2001,PHYS,5\nA,U,2001,CHEM,6\n"
        "B,U,2001,C,1\nC,U,2001,C,1\nD,U,2001,C,1\nE,U,2001,C,1\nF,U,2001,C,1\n"
        "G,U,2001,C,1\nH,U,2001,C,1\nI,U,2001,C,1\nJ,U,2001,C,1\n";
    const auto merged = parse_records(conflict);
    REQUIRE(merged.rejects.size() == 1);
    CHECK(merged.rejects[0].row == 3);
}

TEST_CASE("percentiles outside [0, 100] are rejected", "[data]") {
    IngestionConfig lenient;
    lenient.max_reject_fraction = 1.0;
    const auto parsed = parse_records(std::string_view("id,institution,pub_year,category,citations,inv_percentile\n"
                                                       "A,U,2001,C,5,101\nB,U,2001,C,5,50\n"),
                                      lenient);
    REQUIRE(parsed.rejects.size() == 1);
    CHECK(parsed.rejects[0].reason == "inv_percentile outside [0, 100]");
}

TEST_CASE("writing then parsing reproduces the dataset", "[data]") {
    std::mt19937_64 gen(7);
    for (int round = 0; round < 50; ++round) {
        std::vector<PublicationRecord> records;
        const int n = 1 + static_cast<int>(gen() % 40);
        for (int i = 0; i < n; ++i) {
            auto r = rec("id," + std::to_string(i), "Inst \"" + std::to_string(gen() % 3) + "\"",
                         2000 + static_cast<int>(gen() % 4), {"CAT" + std::to_string(gen() % 5)},
                         static_cast<std::int64_t>(gen() % 500));
            if (gen() % 2) r.categories.push_back("EXTRA");
            if (round % 2) r.inv_percentile = std::uniform_real_distribution<double>(0.0, 100.0)(gen);
            records.push_back(std::move(r));
        }
        const Dataset original(records);
        std::ostringstream out;
        write_records(out, original);
        const auto back = parse_records(out.str());
        CHECK(back.rejects.empty());
        CHECK(back.dataset.records() == original.records());
    }
}

TEST_CASE("reference sets match a brute-force grouping", "[data][property]") {
    std::mt19937_64 gen(11);
    const std::vector<std::string> cats{"A", "B", "C", "D"};
    for (int round = 0; round < 200; ++round) {
        std::vector<PublicationRecord> records;
        const int n = 1 + static_cast<int>(gen() % 30);
        for (int i = 0; i < n; ++i) {
            std::vector<std::string> mine;
            for (const auto& c : cats)
                if (gen() % 3 == 0) mine.push_back(c);
            if (mine.empty()) mine.push_back(cats[gen() % cats.size()]);
            records.push_back(rec("p" + std::to_string(i), "U", 2000 + static_cast<int>(gen() % 3), mine, 1));
        }
        const Dataset d(records);
        const auto sets = group_reference_sets(d);

        std::size_t expected_sets = 0;
        std::size_t memberships = 0;
        for (const auto& c : cats)
            for (int y = 2000; y <= 2002; ++y) {
                std::vector<std::string> ids;
                for (const auto& r : records)
                    if (r.pub_year == y && std::find(r.categories.begin(), r.categories.end(), c) != r.categories.end())
                        ids.push_back(r.id);
                if (ids.empty()) continue;
                ++expected_sets;
                memberships += ids.size();
                const auto it = std::find_if(sets.begin(), sets.end(),
                                             [&](const auto& s) { return s.key == ReferenceSetKey{c, y}; });
                REQUIRE(it != sets.end());
                std::vector<std::string> got;
                for (const auto& m : it->members) got.push_back(m.id);
                CHECK(got == ids);
            }
        CHECK(sets.size() == expected_sets);
        std::size_t total = 0;
        for (const auto& s : sets) total += s.members.size();
        CHECK(total == memberships);
        CHECK(std::is_sorted(sets.begin(), sets.end(), [](const auto& a, const auto& b) { return a.key < b.key; }));
    }
}

TEST_CASE("best category keeps the lowest inverted percentile", "[data]") {
    const std::vector<std::pair<std::string, double>> v{{"PHYS", 34.0}, {"CHEM", 8.5}, {"MATH", 61.0}};
    CHECK(best_category_percentile(v) == 8.5);
    CHECK_THROWS_AS(best_category_percentile({}), PreconditionError);
    const std::vector<std::pair<std::string, double>> bad{{"PHYS", 120.0}};
    CHECK_THROWS_AS(best_category_percentile(bad), PreconditionError);
}

TEST_CASE("year filter and institution lookup", "[data]") {
    const Dataset d({rec("a", "X", 2001, {"C"}, 1), rec("b", "Y", 2003, {"C"}, 2), rec("c", "X", 2002, {"C"}, 3)});
    const auto kept = filter_years(d, 2002);
    CHECK(kept.size() == 2);
    CHECK(kept.year_range() == std::pair{2001, 2002});
    CHECK_THROWS_AS(filter_years(d, 1990), EmptyDatasetError);

    CHECK(select_institution_sample(d, "X").n() == 2);
    try {
        select_institution_sample(d, "Z");
        FAIL("lookup should throw");
    } catch (const LookupError& e) {
        CHECK(std::string(e.what()).find("known: X, Y") != std::string::npos);
    }
}

TEST_CASE("record invariants", "[data]") {
    CHECK_THROWS_AS(Dataset({rec("a", "X", 2001, {}, 1)}), PreconditionError);
    CHECK_THROWS_AS(Dataset({rec("a", "X", 2001, {"C"}, -1)}), PreconditionError);
    CHECK(ReferenceSetKey{"PHYS_CM", 2001}.label() == "PHYS_CM:2001");
}
