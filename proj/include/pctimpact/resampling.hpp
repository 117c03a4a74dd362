#ifndef PCTIMPACT_RESAMPLING_HPP
#define PCTIMPACT_RESAMPLING_HPP

// Nonparametric double-checks: a seeded bootstrap whose replicates are
// reproducible regardless of thread count, and the Mann-Whitney rank-sum test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string_view>
#include <thread>
#include <vector>

#include "pctimpact/distributions.hpp"
#include "pctimpact/effect_stats.hpp"
#include "pctimpact/errors.hpp"

namespace pctimpact::resample {

enum class Statistic { Mean, MeanDiff, Proportion, PropDiff };
enum class CiMethod { NormalApprox, Percentile };

inline std::string_view to_string(Statistic s) {
    switch (s) {
    case Statistic::Mean: return "mean";
    case Statistic::MeanDiff: return "mean_diff";
    case Statistic::Proportion: return "proportion";
    case Statistic::PropDiff: return "prop_diff";
    }
    return "mean";
}

inline std::string_view to_string(CiMethod m) { return m == CiMethod::NormalApprox ? "normal" : "percentile"; }

inline constexpr std::size_t kDefaultReplicates = 1000;
inline constexpr std::uint64_t kDefaultSeed = 20130101;

struct BootstrapSpec {
    std::size_t replicates = kDefaultReplicates;
    std::uint64_t seed = kDefaultSeed;
    CiMethod ci_method = CiMethod::NormalApprox;
    double level = 0.95;
    unsigned threads = 1;
};

struct BootstrapResult {
    double point = 0.0;
    double se_boot = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t replicates_used = 0;
    bool degenerate = false;  // every replicate equal; the interval collapses to the point

    bool excludes(double value) const { return value < ci_low || value > ci_high; }
};

/// SplitMix64 finalizer; derives independent per-replicate seeds from
/// (master seed, replicate index).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t replicate) {
    return mix64(master ^ mix64(replicate));
}

namespace detail {

inline double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline bool is_two_sample(Statistic s) { return s == Statistic::MeanDiff || s == Statistic::PropDiff; }

// Bounded uniform index from a 64-bit generator, rejection-sampled so the
// stream is identical across standard libraries.
inline std::size_t draw_index(std::mt19937_64& gen, std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = gen();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

inline double resampled_mean(std::mt19937_64& gen, std::span<const double> v) {
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) sum += v[draw_index(gen, v.size())];
    return sum / static_cast<double>(v.size());
}

// Linear interpolation between order statistics (Hyndman-Fan type 7).
inline double quantile_sorted(std::span<const double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

} // namespace detail

/// One bootstrap replicate. Two-sample statistics resample each group with
/// its own size; group a is drawn before group b.
inline double bootstrap_replicate(std::span<const double> a, std::span<const double> b, Statistic stat,
                                  std::uint64_t seed, std::size_t replicate) {
    std::mt19937_64 gen(replicate_seed(seed, replicate));
    const double first = detail::resampled_mean(gen, a);
    if (!detail::is_two_sample(stat)) return first;
    return first - detail::resampled_mean(gen, b);
}

/// Bootstrap for a mean, mean difference, proportion (0/1 data), or
/// proportion difference. `b` is ignored for one-sample statistics.
inline BootstrapResult bootstrap_statistic(std::span<const double> a, std::span<const double> b, Statistic stat,
                                           const BootstrapSpec& spec) {
    if (spec.replicates < 1) throw PreconditionError("bootstrap: replicates must be >= 1");
    if (!(spec.level > 0.0 && spec.level < 1.0)) throw PreconditionError("bootstrap: level must lie in (0, 1)");
    const bool two = detail::is_two_sample(stat);
    if (a.size() < 2 || (two && b.size() < 2)) throw PreconditionError("bootstrap: samples need at least two values");
    if (stat == Statistic::Proportion || stat == Statistic::PropDiff) {
        auto binary = [](std::span<const double> v) {
            return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0 || x == 1.0; });
        };
        if (!binary(a) || (two && !binary(b))) throw PreconditionError("bootstrap: proportion data must be 0/1");
    }

    BootstrapResult r;
    r.point = two ? detail::mean_of(a) - detail::mean_of(b) : detail::mean_of(a);
    r.replicates_used = spec.replicates;

    std::vector<double> reps(spec.replicates);
    const unsigned workers = std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(spec.replicates)));
    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) reps[i] = bootstrap_replicate(a, b, stat, spec.seed, i);
    };
    if (workers == 1) {
        run(0, reps.size());
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (reps.size() + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(reps.size(), begin + chunk);
            if (begin < end) pool.emplace_back(run, begin, end);
        }
    }

    const double mean = detail::mean_of(reps);
    double ss = 0.0;
    for (double v : reps) ss += (v - mean) * (v - mean);
    r.se_boot = reps.size() > 1 ? std::sqrt(ss / static_cast<double>(reps.size() - 1)) : 0.0;
    r.degenerate = std::all_of(reps.begin(), reps.end(), [&](double v) { return v == reps.front(); });

    if (r.degenerate) {
        r.se_boot = 0.0;
        r.ci_low = r.ci_high = r.point;
    } else if (spec.ci_method == CiMethod::NormalApprox) {
        const double z = stats::z_critical(spec.level);
        r.ci_low = r.point - z * r.se_boot;
        r.ci_high = r.point + z * r.se_boot;
    } else {
        std::sort(reps.begin(), reps.end());
        const double alpha = (1.0 - spec.level) / 2.0;
        r.ci_low = detail::quantile_sorted(reps, alpha);
        r.ci_high = detail::quantile_sorted(reps, 1.0 - alpha);
    }
    return r;
}

struct RankSumResult {
    double u_statistic = 0.0;  // U for group a: rank sum of a minus n_a (n_a + 1) / 2
    double rank_sum_a = 0.0;
    double expected_rank_sum = 0.0;
    double variance = 0.0;  // tie-corrected variance of the rank sum
    double z_approx = 0.0;  // positive when a tends to hold the larger values
    double p_two_tailed = 1.0;
};

/// Midranks over the pooled sample, in the order a then b.
inline std::vector<double> midranks(std::span<const double> a, std::span<const double> b) {
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return pooled[x] < pooled[y]; });
    std::vector<double> ranks(pooled.size());
    for (std::size_t start = 0; start < order.size();) {
        std::size_t end = start + 1;
        while (end < order.size() && pooled[order[end]] == pooled[order[start]]) ++end;
        const double mid = 0.5 * static_cast<double>(start + 1 + end);
        for (std::size_t k = start; k < end; ++k) ranks[order[k]] = mid;
        start = end;
    }
    return ranks;
}

/// Mann-Whitney / Wilcoxon rank-sum test with the normal approximation and
/// the tie-corrected variance. The continuity correction moves the rank sum
/// half a unit toward its expectation before standardizing.
inline RankSumResult mann_whitney(std::span<const double> a, std::span<const double> b, bool continuity = true) {
    if (a.empty() || b.empty()) throw PreconditionError("mann_whitney: both groups must be non-empty");
    const auto ranks = midranks(a, b);
    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    const double n = n1 + n2;

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());
    double tie_term = 0.0;
    for (std::size_t s = 0; s < pooled.size();) {
        std::size_t e = s + 1;
        while (e < pooled.size() && pooled[e] == pooled[s]) ++e;
        const double t = static_cast<double>(e - s);
        tie_term += t * t * t - t;
        s = e;
    }

    RankSumResult r;
    r.rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
    r.u_statistic = r.rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    r.expected_rank_sum = n1 * (n + 1.0) / 2.0;
    r.variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (!(r.variance > 0.0)) throw DegenerateError("mann_whitney: all values are identical");
    double dev = r.rank_sum_a - r.expected_rank_sum;
    if (continuity) dev = std::copysign(std::max(0.0, std::fabs(dev) - 0.5), dev);
    r.z_approx = dev / std::sqrt(r.variance);
    r.p_two_tailed = dist::normal_p_two_tailed(r.z_approx);
    return r;
}

} // namespace pctimpact::resample

#endif
