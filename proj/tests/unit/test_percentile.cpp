#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include "pctimpact/percentile.hpp"
#include "oracles/percentile_oracle.hpp"

using namespace pctimpact;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<std::int64_t> tie_example() {
    std::vector<std::int64_t> v(3, 61);
    v.insert(v.end(), 7, 58);
    v.insert(v.end(), 40, 1);
    return v;
}

std::vector<std::int64_t> random_citations(std::mt19937_64& gen, std::size_t max_len = 60) {
    const std::size_t n = 1 + gen() % max_len;
    const std::int64_t range = 1 + static_cast<std::int64_t>(gen() % 40);
    std::vector<std::int64_t> v(n);
    for (auto& c : v) c = static_cast<std::int64_t>(gen() % static_cast<std::uint64_t>(range));
    return v;
}

} // namespace

TEST_CASE("common formula on a small set", "[percentile]") {
    const std::vector<std::int64_t> v{0, 3, 3, 10};
    const auto r = percentile_rank(v, PercentileScheme{});
    CHECK(r[0].rank == 1);
    CHECK(r[1].rank == 3);
    CHECK(r[2].rank == 3);
    CHECK(r[3].rank == 4);
    CHECK(r[0].percentile == 0.0);
    CHECK(r[1].percentile == 50.0);
    CHECK(r[3].percentile == 75.0);
    CHECK(r[1].tied_with == 2);
}

TEST_CASE("incites scheme pins uncited papers to 100", "[percentile]") {
    const std::vector<std::int64_t> v{0, 0, 5, 9};
    const auto r = percentile_rank(v, kInCitesScheme);
    CHECK(r[3].rank == 1);
    CHECK(r[3].percentile == 25.0);
    CHECK(r[2].percentile == 50.0);
    CHECK(r[0].percentile == 100.0);
    CHECK(r[1].percentile == 100.0);

    PercentileScheme ascending{PercentileFormula::Common, false, true, TiePolicy::Min};
    const auto a = percentile_rank(v, ascending);
    CHECK(a[0].percentile == 0.0);
    CHECK(a[3].percentile == 75.0);
}

TEST_CASE("ties at the top-10 threshold", "[percentile]") {
    const auto v = tie_example();
    auto binary = [&](TiePolicy policy) {
        PercentileScheme s = kInCitesScheme;
        s.ties = policy;
        int top = 0;
        for (const auto& a : percentile_rank(v, s)) top += classify_top_x(a.percentile, 10.0);
        return top;
    };
    CHECK(binary(TiePolicy::Max) == 3);
    CHECK(binary(TiePolicy::Min) == 10);

    const auto f = fractional_top_share(v, 10.0);
    CHECK(f.threshold_citations == 58);
    CHECK(f.share == 0.10);
    CHECK(f.weights[0] == 1.0);
    CHECK_THAT(f.weights[3], WithinAbs(2.0 / 7.0, 1e-15));
    CHECK(f.weights[49] == 0.0);
    CHECK_THAT(std::accumulate(f.weights.begin(), f.weights.end(), 0.0), WithinAbs(5.0, 1e-12));
}

TEST_CASE("brute-force oracle over every short list of {0,1,2}", "[percentile][property]") {
    const std::vector<PercentileScheme> schemes{
        {PercentileFormula::Common, false, false, TiePolicy::Max},
        {PercentileFormula::Common, true, false, TiePolicy::Min},
        {PercentileFormula::InCites, true, true, TiePolicy::Max},
        {PercentileFormula::InCites, false, true, TiePolicy::Min},
    };
    const auto lists = oracle::for_each_small_list(8, 3, [&](const std::vector<std::int64_t>& v) {
        const double n = static_cast<double>(v.size());
        for (const auto& s : schemes) {
            const auto got = percentile_rank(v, s, 25.0);
            for (std::size_t k = 0; k < v.size(); ++k) {
                const auto rank = oracle::rank(v, k, s.inverted, s.ties == TiePolicy::Max);
                double pct = s.formula == PercentileFormula::Common ? 100.0 * (static_cast<double>(rank) - 1.0) / n : 100.0 * static_cast<double>(rank) / n;
                if (s.zero_rank_adjust && v[k] == 0) pct = s.inverted ? 100.0 : 0.0;
                if (got[k].rank != rank || got[k].percentile != pct) FAIL_CHECK("rank mismatch, length " << v.size());
                if (std::fabs(got[k].top_x_weight - oracle::top_weight(v, k, 25.0)) > 1e-12)
                    FAIL_CHECK("weight mismatch, length " << v.size());
            }
        }
    });
    CHECK(lists == 9840);
}

TEST_CASE("percentiles are monotone in citations and stay in range", "[percentile][property]") {
    std::mt19937_64 gen(101);
    for (int round = 0; round < 1000; ++round) {
        const auto v = random_citations(gen);
        PercentileScheme s;
        s.formula = gen() % 2 ? PercentileFormula::Common : PercentileFormula::InCites;
        s.inverted = gen() % 2;
        s.ties = gen() % 2 ? TiePolicy::Max : TiePolicy::Min;
        const auto r = percentile_rank(v, s);
        for (std::size_t i = 0; i < v.size(); ++i) {
            REQUIRE(r[i].percentile >= 0.0);
            REQUIRE(r[i].percentile <= 100.0);
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (v[i] < v[j]) {
                    if (s.inverted) REQUIRE(r[i].percentile > r[j].percentile);
                    else REQUIRE(r[i].percentile < r[j].percentile);
                }
                if (v[i] == v[j]) REQUIRE(r[i].percentile == r[j].percentile);
            }
        }
    }
}

TEST_CASE("fractional weights sum to n x / 100", "[percentile][property]") {
    std::mt19937_64 gen(202);
    std::uniform_real_distribution<double> xdist(0.5, 99.5);
    for (int round = 0; round < 1000; ++round) {
        const auto v = random_citations(gen, 200);
        const double x = round % 3 == 0 ? 10.0 : xdist(gen);
        const auto f = fractional_top_share(v, x);
        const double sum = std::accumulate(f.weights.begin(), f.weights.end(), 0.0);
        REQUIRE_THAT(sum, WithinAbs(static_cast<double>(v.size()) * x / 100.0, 1e-9));
        for (std::size_t i = 0; i < v.size(); ++i) {
            REQUIRE(f.weights[i] >= 0.0);
            REQUIRE(f.weights[i] <= 1.0);
            for (std::size_t j = 0; j < v.size(); ++j)
                if (v[i] > v[j]) REQUIRE(f.weights[i] >= f.weights[j]);
        }
    }
}

TEST_CASE("top-x classification boundary", "[percentile]") {
    CHECK(classify_top_x(10.0, 10.0) == 1);
    CHECK(classify_top_x(10.000001, 10.0) == 0);
    CHECK(classify_top_x(0.0, 1.0) == 1);
    CHECK_THROWS_AS(classify_top_x(101.0, 10.0), PreconditionError);
    CHECK_THROWS_AS(classify_top_x(5.0, 0.0), PreconditionError);
}

TEST_CASE("empty inputs are precondition errors", "[percentile]") {
    const std::vector<std::int64_t> none;
    CHECK_THROWS_AS(percentile_rank(none, PercentileScheme{}), PreconditionError);
    CHECK_THROWS_AS(fractional_top_share(none, 10.0), PreconditionError);
    CHECK_THROWS_AS(rank_ascending(none), PreconditionError);
}

TEST_CASE("institution top share by counting mode", "[percentile]") {
    InstitutionSample sample{"U", {}};
    for (int i = 0; i < 10; ++i) {
        PublicationRecord r;
        r.id = "p" + std::to_string(i);
        r.institution = "U";
        r.pub_year = 2001;
        r.categories = {"C"};
        r.inv_percentile = i * 5.0;  // 0, 5, 10 are top-10
        sample.records.push_back(r);
    }
    const auto b = institution_top_share(sample, 10.0, Counting::Binary);
    CHECK(b.numerator == 3.0);
    CHECK_THAT(b.share, WithinAbs(0.3, 1e-15));

    CHECK_THROWS_AS(institution_top_share(sample, 10.0, Counting::Fractional), CapabilityError);
    TopWeights w;
    for (const auto& r : sample.records) w[r.id] = 0.25;
    CHECK_THAT(institution_top_share(sample, 10.0, Counting::Fractional, &w).share, WithinAbs(0.25, 1e-15));

    sample.records[0].inv_percentile.reset();
    CHECK_THROWS_AS(institution_top_share(sample, 10.0, Counting::Binary), CapabilityError);
}

TEST_CASE("MNCS", "[percentile]") {
    const std::vector<std::int64_t> c{10, 0, 30};
    const std::vector<double> m{10.0, 5.0, 15.0};
    CHECK_THAT(mncs(c, m), WithinAbs(1.0, 1e-15));
    const std::vector<double> zero{10.0, 0.0, 15.0};
    CHECK_THROWS_AS(mncs(c, zero), DegenerateError);
}

TEST_CASE("a single extreme paper moves MNCS but not the fractional share", "[percentile]") {
    // Reference set: 1000 papers, mostly lowly cited, plus the outlier.
    std::vector<std::int64_t> set(1000);
    for (std::size_t i = 0; i < set.size(); ++i) set[i] = static_cast<std::int64_t>(i % 20);
    set.back() = 4000;
    const std::vector<std::vector<std::int64_t>> sets{set};
    std::vector<ReferenceMembership> unit;
    for (std::size_t i = 900; i < 1000; ++i) unit.push_back({set[i], 0});
    const auto rep = outlier_sensitivity(std::span<const ReferenceMembership>(unit),
                                         std::span<const std::vector<std::int64_t>>(sets), 10.0);
    CHECK(rep.dropped_citations == 4000);
    CHECK(rep.n == 100);
    CHECK(std::fabs(rep.mncs_rel_delta()) > 0.3);
    CHECK(std::fabs(rep.top_share_abs_delta()) < 0.02);
}

TEST_CASE("outlier removal keeps reference statistics fixed", "[percentile]") {
    const std::vector<ReferencedPaper> papers{{4, 2.0, 0.0}, {10, 5.0, 1.0}, {2, 1.0, 0.5}};
    const auto rep = outlier_sensitivity(papers);
    CHECK(rep.dropped_index == 1);
    CHECK_THAT(rep.mncs_with, WithinAbs((2.0 + 2.0 + 2.0) / 3.0, 1e-15));
    CHECK_THAT(rep.mncs_without, WithinAbs(2.0, 1e-15));
    CHECK_THAT(rep.top_share_with, WithinAbs(0.5, 1e-15));
    CHECK_THAT(rep.top_share_without, WithinAbs(0.25, 1e-15));
    CHECK_THROWS_AS(outlier_sensitivity(std::span<const ReferencedPaper>(papers.data(), 1)), PreconditionError);
}

TEST_CASE("dataset normalization uses the best category", "[percentile]") {
    auto rec = [](std::string id, std::vector<std::string> cats, std::int64_t c) {
        PublicationRecord r;
        r.id = std::move(id);
        r.institution = "U";
        r.pub_year = 2001;
        r.categories = std::move(cats);
        r.citations = c;
        return r;
    };
    // "x" is the top paper in B but middling in A.
    const Dataset d({rec("x", {"A", "B"}, 5), rec("a1", {"A"}, 9), rec("a2", {"A"}, 1), rec("b1", {"B"}, 2)});
    const auto inv = normalize_dataset(d, kInCitesScheme, 10.0);
    REQUIRE(inv.size() == 4);
    CHECK(inv[0].paper_id == "x");
    CHECK(inv[0].reference_set == "B:2001");
    CHECK(inv[0].percentile == 50.0);
    CHECK(inv[0].reference_mean == 3.5);

    const auto asc = normalize_dataset(d, PercentileScheme{}, 10.0);
    CHECK(asc[0].reference_set == "B:2001");
    CHECK(asc[0].percentile == 50.0);

    const auto weights = top_weights(inv);
    CHECK(weights.at("x") == 0.2);  // best weight over both categories
    const auto scored = with_percentiles(d, inv);
    CHECK(scored.has_supplied_percentiles());
    CHECK(*scored.records()[0].inv_percentile == 50.0);
}
