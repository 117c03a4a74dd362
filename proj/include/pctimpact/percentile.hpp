#ifndef PCTIMPACT_PERCENTILE_HPP
#define PCTIMPACT_PERCENTILE_HPP

// Percentile ranks inside reference sets, top-x% classification with
// fractional counting at tied thresholds, and the mean normalized citation
// score (MNCS) used for the outlier-sensitivity contrast.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pctimpact/citation_data.hpp"
#include "pctimpact/errors.hpp"

namespace pctimpact {

enum class PercentileFormula {
    Common,  // 100 * (i - 1) / n
    InCites  // 100 * i / n
};

/// Rank given to every member of a tie group.
enum class TiePolicy { Max, Min };

struct PercentileScheme {
    PercentileFormula formula = PercentileFormula::Common;
    /// Rank by descending citations, so 0 is best and 100 is worst.
    bool inverted = false;
    /// Pin zero-citation papers to the worst value (0, or 100 when inverted).
    bool zero_rank_adjust = false;
    TiePolicy ties = TiePolicy::Max;
};

/// The InCites convention: 100 * i / n over descending ranks, zero-cited papers at 100.
inline constexpr PercentileScheme kInCitesScheme{PercentileFormula::InCites, true, true, TiePolicy::Max};

struct PercentileAssignment {
    std::string paper_id;
    std::size_t rank = 1;
    double percentile = 0.0;
    std::size_t tied_with = 1;
    double top_x_weight = 0.0;
};

enum class Counting { Binary, Fractional };

struct TopShareResult {
    std::string institution;
    std::size_t n = 0;
    double numerator = 0.0;  // papers (binary) or summed weights (fractional)
    double share = 0.0;      // PP_top x%, in [0, 1]
    double threshold_x = 10.0;
    Counting counting = Counting::Binary;
};

struct FractionalTopShare {
    std::vector<double> weights;  // parallel to the input citations
    std::int64_t threshold_citations = 0;
    double share = 0.0;
};

namespace detail {

inline void check_top_x(double x) {
    if (!(x > 0.0 && x < 100.0)) throw PreconditionError("top-x threshold must lie in (0, 100)");
}

// Ranks 1..n under the given ordering; tie groups get their max or min rank.
template <class Less>
std::vector<std::size_t> rank_by(std::span<const std::int64_t> citations, TiePolicy policy, Less less) {
    if (citations.empty()) throw PreconditionError("cannot rank an empty citation list");
    std::vector<std::size_t> order(citations.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return less(citations[a], citations[b]); });
    std::vector<std::size_t> ranks(citations.size());
    for (std::size_t start = 0; start < order.size();) {
        std::size_t end = start + 1;
        while (end < order.size() && citations[order[end]] == citations[order[start]]) ++end;
        const std::size_t rank = policy == TiePolicy::Max ? end : start + 1;
        for (std::size_t k = start; k < end; ++k) ranks[order[k]] = rank;
        start = end;
    }
    return ranks;
}

inline std::vector<std::size_t> tie_group_sizes(std::span<const std::int64_t> citations) {
    std::map<std::int64_t, std::size_t> counts;
    for (auto c : citations) ++counts[c];
    std::vector<std::size_t> sizes;
    sizes.reserve(citations.size());
    for (auto c : citations) sizes.push_back(counts[c]);
    return sizes;
}

} // namespace detail

inline std::vector<std::size_t> rank_ascending(std::span<const std::int64_t> citations,
                                               TiePolicy policy = TiePolicy::Max) {
    return detail::rank_by(citations, policy, std::less<>{});
}

inline std::vector<std::size_t> rank_descending(std::span<const std::int64_t> citations,
                                                TiePolicy policy = TiePolicy::Max) {
    return detail::rank_by(citations, policy, std::greater<>{});
}

/// Fractional counting at the top-x threshold. With s = n * x / 100 slots,
/// papers cited more than the paper at descending position ceil(s) get weight
/// 1, the tie group at that position shares the remaining slots equally, and
/// everything below gets 0. The weights always sum to s.
inline FractionalTopShare fractional_top_share(std::span<const std::int64_t> citations, double x) {
    if (citations.empty()) throw PreconditionError("fractional_top_share: empty reference set");
    detail::check_top_x(x);
    const auto n = citations.size();
    const double slots = static_cast<double>(n) * x / 100.0;
    auto position = static_cast<std::size_t>(std::ceil(slots - 1e-12 * static_cast<double>(n)));
    position = std::clamp<std::size_t>(position, 1, n);

    std::vector<std::int64_t> sorted(citations.begin(), citations.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>{});
    const std::int64_t threshold = sorted[position - 1];
    const auto above = static_cast<double>(std::count_if(sorted.begin(), sorted.end(), [&](auto c) { return c > threshold; }));
    const auto tied = static_cast<double>(std::count(sorted.begin(), sorted.end(), threshold));
    const double tie_weight = std::clamp((slots - above) / tied, 0.0, 1.0);

    FractionalTopShare out;
    out.threshold_citations = threshold;
    out.weights.reserve(n);
    for (auto c : citations) {
        const double w = c > threshold ? 1.0 : (c == threshold ? tie_weight : 0.0);
        out.weights.push_back(w);
    }
    out.share = (above + std::clamp(slots - above, 0.0, tied)) / static_cast<double>(n);
    return out;
}

/// Percentile ranks for one reference set. Ranks are ascending, or descending
/// when the scheme is inverted; zero-citation pinning runs after tie resolution.
inline std::vector<PercentileAssignment> percentile_rank(std::span<const std::int64_t> citations,
                                                         const PercentileScheme& scheme, double top_x = 10.0,
                                                         std::span<const std::string> ids = {}) {
    if (citations.empty()) throw PreconditionError("percentile_rank: empty reference set");
    if (!ids.empty() && ids.size() != citations.size())
        throw PreconditionError("percentile_rank: ids and citations differ in length");
    const auto ranks = scheme.inverted ? rank_descending(citations, scheme.ties) : rank_ascending(citations, scheme.ties);
    const auto ties = detail::tie_group_sizes(citations);
    const auto fractional = fractional_top_share(citations, top_x);
    const auto n = static_cast<double>(citations.size());

    std::vector<PercentileAssignment> out;
    out.reserve(citations.size());
    for (std::size_t k = 0; k < citations.size(); ++k) {
        const auto i = static_cast<double>(ranks[k]);
        double pct = scheme.formula == PercentileFormula::Common ? 100.0 * (i - 1.0) / n : 100.0 * i / n;
        if (scheme.zero_rank_adjust && citations[k] == 0) pct = scheme.inverted ? 100.0 : 0.0;
        out.push_back({ids.empty() ? std::to_string(k) : ids[k], ranks[k], pct, ties[k], fractional.weights[k]});
    }
    return out;
}

inline std::vector<PercentileAssignment> percentile_rank(const ReferenceSet& set, const PercentileScheme& scheme,
                                                         double top_x = 10.0) {
    std::vector<std::string> ids;
    ids.reserve(set.members.size());
    for (const auto& m : set.members) ids.push_back(m.id);
    const auto cites = set.citations();
    return percentile_rank(cites, scheme, top_x, ids);
}

/// 1 when an inverted percentile is within the top x%, else 0.
inline int classify_top_x(double inv_percentile, double x) {
    if (!(inv_percentile >= 0.0 && inv_percentile <= 100.0))
        throw PreconditionError("classify_top_x: percentile outside [0, 100]");
    detail::check_top_x(x);
    return inv_percentile <= x ? 1 : 0;
}

/// Paper id -> fractional top-x weight, built from complete reference sets.
using TopWeights = std::unordered_map<std::string, double>;

inline TopShareResult institution_top_share(const InstitutionSample& sample, double x, Counting counting,
                                            const TopWeights* weights = nullptr) {
    if (sample.n() == 0) throw PreconditionError("institution_top_share: empty sample");
    detail::check_top_x(x);
    TopShareResult out{sample.institution, sample.n(), 0.0, 0.0, x, counting};
    if (counting == Counting::Binary) {
        for (const auto& r : sample.records) {
            if (!r.inv_percentile)
                throw CapabilityError("binary top-x share needs an inverted percentile for paper " + r.id);
            out.numerator += classify_top_x(*r.inv_percentile, x);
        }
    } else {
        if (weights == nullptr)
            throw CapabilityError("fractional counting needs the raw citations of complete reference sets");
        for (const auto& r : sample.records) {
            const auto it = weights->find(r.id);
            if (it == weights->end()) throw CapabilityError("no fractional weight for paper " + r.id);
            out.numerator += it->second;
        }
    }
    out.share = out.numerator / static_cast<double>(sample.n());
    return out;
}

/// Mean over papers of citations / reference-set mean citations.
inline double mncs(std::span<const std::int64_t> citations, std::span<const double> reference_means) {
    if (citations.empty()) throw PreconditionError("mncs: empty sample");
    if (citations.size() != reference_means.size()) throw PreconditionError("mncs: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < citations.size(); ++i) {
        if (!(reference_means[i] > 0.0))
            throw DegenerateError("mncs: reference-set mean citation rate must be positive");
        sum += static_cast<double>(citations[i]) / reference_means[i];
    }
    return sum / static_cast<double>(citations.size());
}

/// A paper of the evaluated unit together with its reference-set statistics.
struct ReferencedPaper {
    std::int64_t citations = 0;
    double reference_mean = 0.0;
    double top_x_weight = 0.0;
};

struct OutlierReport {
    std::size_t n = 0;
    std::size_t dropped_index = 0;  // the most-cited paper (first one on ties)
    std::int64_t dropped_citations = 0;
    double mncs_with = 0.0;
    double mncs_without = 0.0;
    double top_share_with = 0.0;
    double top_share_without = 0.0;

    double mncs_abs_delta() const { return mncs_without - mncs_with; }
    double mncs_rel_delta() const { return mncs_with != 0.0 ? mncs_abs_delta() / mncs_with : 0.0; }
    double top_share_abs_delta() const { return top_share_without - top_share_with; }
    double top_share_rel_delta() const {
        return top_share_with != 0.0 ? top_share_abs_delta() / top_share_with : 0.0;
    }
};

/// Recomputes MNCS and the fractional top-x share after dropping the single
/// most-cited paper. Reference statistics stay fixed: only the evaluated
/// unit loses the paper.
inline OutlierReport outlier_sensitivity(std::span<const ReferencedPaper> sample) {
    if (sample.size() < 2) throw PreconditionError("outlier_sensitivity: need at least two papers");
    const auto max_it = std::max_element(sample.begin(), sample.end(),
                                         [](const auto& a, const auto& b) { return a.citations < b.citations; });
    OutlierReport rep;
    rep.n = sample.size();
    rep.dropped_index = static_cast<std::size_t>(max_it - sample.begin());
    rep.dropped_citations = max_it->citations;

    auto indicators = [](std::span<const ReferencedPaper> papers, std::size_t skip, double& m, double& share) {
        std::vector<std::int64_t> cites;
        std::vector<double> means;
        double weight_sum = 0.0;
        for (std::size_t i = 0; i < papers.size(); ++i) {
            if (i == skip) continue;
            cites.push_back(papers[i].citations);
            means.push_back(papers[i].reference_mean);
            weight_sum += papers[i].top_x_weight;
        }
        m = mncs(cites, means);
        share = weight_sum / static_cast<double>(cites.size());
    };
    indicators(sample, sample.size(), rep.mncs_with, rep.top_share_with);
    indicators(sample, rep.dropped_index, rep.mncs_without, rep.top_share_without);
    return rep;
}

/// Papers of one unit that are members of raw reference sets given by index.
struct ReferenceMembership {
    std::int64_t citations = 0;
    std::size_t reference_index = 0;
};

/// Derives reference means and fractional weights from the raw reference
/// sets, then runs outlier_sensitivity. Each paper's citation count must
/// occur in its reference set.
inline OutlierReport outlier_sensitivity(std::span<const ReferenceMembership> sample,
                                         std::span<const std::vector<std::int64_t>> reference_sets, double x) {
    std::vector<double> means(reference_sets.size());
    std::vector<std::map<std::int64_t, double>> weight_of(reference_sets.size());
    for (std::size_t s = 0; s < reference_sets.size(); ++s) {
        const auto& set = reference_sets[s];
        if (set.empty()) throw PreconditionError("outlier_sensitivity: empty reference set");
        means[s] = std::accumulate(set.begin(), set.end(), 0.0) / static_cast<double>(set.size());
        const auto frac = fractional_top_share(set, x);
        for (std::size_t i = 0; i < set.size(); ++i) weight_of[s][set[i]] = frac.weights[i];
    }
    std::vector<ReferencedPaper> papers;
    papers.reserve(sample.size());
    for (const auto& m : sample) {
        if (m.reference_index >= reference_sets.size())
            throw PreconditionError("outlier_sensitivity: reference index out of range");
        const auto it = weight_of[m.reference_index].find(m.citations);
        if (it == weight_of[m.reference_index].end())
            throw PreconditionError("outlier_sensitivity: paper is not a member of its reference set");
        papers.push_back({m.citations, means[m.reference_index], it->second});
    }
    return outlier_sensitivity(papers);
}

/// Per-paper normalization of a whole dataset: every reference set is ranked,
/// then each paper keeps the result of the category where it performs best.
struct PaperPercentile {
    std::string paper_id;
    std::string institution;
    std::string reference_set;
    std::size_t rank = 1;
    double percentile = 0.0;
    std::size_t tie_group_size = 1;
    double top_x_weight = 0.0;
    double reference_mean = 0.0;
    std::int64_t citations = 0;
};

inline std::vector<PaperPercentile> normalize_dataset(const Dataset& d, const PercentileScheme& scheme, double top_x) {
    std::unordered_map<std::string, PaperPercentile> best;
    for (const auto& set : group_reference_sets(d)) {
        const auto assigned = percentile_rank(set, scheme, top_x);
        const auto cites = set.citations();
        const double mean = std::accumulate(cites.begin(), cites.end(), 0.0) / static_cast<double>(cites.size());
        for (std::size_t k = 0; k < assigned.size(); ++k) {
            const auto& a = assigned[k];
            PaperPercentile p{a.paper_id, set.members[k].institution, set.key.label(), a.rank, a.percentile,
                              a.tied_with, a.top_x_weight, mean, set.members[k].citations};
            auto [it, inserted] = best.try_emplace(a.paper_id, p);
            if (inserted) continue;
            auto& cur = it->second;
            const double weight = std::max(cur.top_x_weight, p.top_x_weight);
            const bool better = scheme.inverted ? p.percentile < cur.percentile : p.percentile > cur.percentile;
            if (better) cur = p;
            cur.top_x_weight = weight;
        }
    }
    std::vector<PaperPercentile> out;
    out.reserve(d.size());
    for (const auto& r : d.records()) out.push_back(best.at(r.id));
    return out;
}

inline TopWeights top_weights(std::span<const PaperPercentile> papers) {
    TopWeights w;
    for (const auto& p : papers) w[p.paper_id] = p.top_x_weight;
    return w;
}

/// Copy of `d` whose records carry the given percentiles.
inline Dataset with_percentiles(const Dataset& d, std::span<const PaperPercentile> papers) {
    std::unordered_map<std::string, double> pct;
    for (const auto& p : papers) pct[p.paper_id] = p.percentile;
    auto records = d.records();
    for (auto& r : records) r.inv_percentile = pct.at(r.id);
    return Dataset(std::move(records));
}

} // namespace pctimpact

#endif
