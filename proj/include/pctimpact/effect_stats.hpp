#ifndef PCTIMPACT_EFFECT_STATS_HPP
#define PCTIMPACT_EFFECT_STATS_HPP

// Closed-form inference on mean percentiles and top-x proportions:
// summaries, one- and two-sample t tests, proportion z tests, Cohen's d and
// h, confidence intervals, and Cohen's magnitude labels.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "pctimpact/distributions.hpp"
#include "pctimpact/errors.hpp"

namespace pctimpact::stats {

/// Conventional two-sided 95% normal multiplier used by the large-sample
/// proportion intervals.
inline constexpr double kZ95 = 1.96;

/// Normal multiplier for a two-sided interval at `level`; exactly 1.96 at 95%.
inline double z_critical(double level) {
    if (!(level > 0.0 && level < 1.0)) throw PreconditionError("confidence level must lie in (0, 1)");
    return level == 0.95 ? kZ95 : dist::normal_quantile(0.5 + level / 2.0);
}

struct SummaryStats {
    std::size_t n = 0;
    double mean = 0.0;
    std::optional<double> sd;  // sample SD (n - 1 divisor); empty when n == 1
    std::optional<double> se;  // sd / sqrt(n)

    /// From published moments, e.g. a table row of (N, mean, SD).
    static SummaryStats from_moments(std::size_t n, double mean, double sd) {
        if (n == 0) throw PreconditionError("summary needs n >= 1");
        if (!(sd >= 0.0)) throw PreconditionError("standard deviation must be non-negative");
        return {n, mean, sd, sd / std::sqrt(static_cast<double>(n))};
    }
};

/// Single-pass (Welford) mean and sample variance.
inline SummaryStats summarize(std::span<const double> values) {
    if (values.empty()) throw PreconditionError("summarize: empty input");
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t k = 0;
    for (double v : values) {
        ++k;
        const double delta = v - mean;
        mean += delta / static_cast<double>(k);
        m2 += delta * (v - mean);
    }
    SummaryStats s{values.size(), mean, std::nullopt, std::nullopt};
    if (values.size() >= 2) {
        s.sd = std::sqrt(m2 / static_cast<double>(values.size() - 1));
        s.se = *s.sd / std::sqrt(static_cast<double>(values.size()));
    }
    return s;
}

enum class Magnitude { Negligible, Small, Medium, Large };

inline constexpr double kSmallEffect = 0.2;
inline constexpr double kMediumEffect = 0.5;
inline constexpr double kLargeEffect = 0.8;

/// Cohen's benchmarks on |effect|; a boundary value belongs to the larger class.
inline Magnitude classify_magnitude(double effect) {
    if (!std::isfinite(effect)) throw PreconditionError("classify_magnitude: effect is not finite");
    const double a = std::fabs(effect);
    if (a >= kLargeEffect) return Magnitude::Large;
    if (a >= kMediumEffect) return Magnitude::Medium;
    if (a >= kSmallEffect) return Magnitude::Small;
    return Magnitude::Negligible;
}

inline std::string_view to_string(Magnitude m) {
    switch (m) {
    case Magnitude::Negligible: return "negligible";
    case Magnitude::Small: return "small";
    case Magnitude::Medium: return "medium";
    case Magnitude::Large: return "large";
    }
    return "negligible";
}

struct MeanTestResult {
    double estimate = 0.0;  // mean, or difference of means
    double se = 0.0;
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;  // two-tailed
    double ci_low = 0.0;
    double ci_high = 0.0;
    double d = 0.0;
    Magnitude magnitude = Magnitude::Negligible;
    std::optional<double> pooled_sd;
    std::string method;
};

struct ProportionTestResult {
    double estimate = 0.0;  // proportion, or difference of proportions
    double se = 0.0;        // unpooled SE behind the interval
    double se_test = 0.0;   // SE behind z: null-implied (one sample) or pooled (two samples)
    double z = 0.0;
    double p = 1.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double h = 0.0;
    Magnitude magnitude = Magnitude::Negligible;
    std::string method;
};

namespace detail {

inline double require_spread(const SummaryStats& s, std::string_view who) {
    if (s.n < 2 || !s.sd) throw PreconditionError(std::string(who) + ": need n >= 2");
    if (!(*s.sd > 0.0)) throw DegenerateError(std::string(who) + ": zero standard deviation");
    return *s.sd;
}

inline void check_level(double level) {
    if (!(level > 0.0 && level < 1.0)) throw PreconditionError("confidence level must lie in (0, 1)");
}

} // namespace detail

/// (mean - mu0) / sd, which equals t / sqrt(n).
inline double cohens_d_one(const SummaryStats& s, double mu0) {
    return (s.mean - mu0) / detail::require_spread(s, "cohens_d_one");
}

inline MeanTestResult one_sample_t(const SummaryStats& s, double mu0, double level = 0.95) {
    const double sd = detail::require_spread(s, "one_sample_t");
    detail::check_level(level);
    MeanTestResult r;
    r.method = "one-sample t";
    r.estimate = s.mean;
    r.se = sd / std::sqrt(static_cast<double>(s.n));
    r.df = static_cast<double>(s.n - 1);
    r.t = (s.mean - mu0) / r.se;
    r.p = dist::t_p_two_tailed(r.t, r.df);
    const double q = dist::t_quantile(0.5 + level / 2.0, r.df);
    r.ci_low = s.mean - q * r.se;
    r.ci_high = s.mean + q * r.se;
    r.d = cohens_d_one(s, mu0);
    r.magnitude = classify_magnitude(r.d);
    return r;
}

inline double pooled_sd(const SummaryStats& a, const SummaryStats& b) {
    // A single-observation group contributes no variance term.
    if (a.n == 0 || b.n == 0 || a.n + b.n < 3 || (a.n > 1 && !a.sd) || (b.n > 1 && !b.sd))
        throw PreconditionError("pooled_sd: need n1 + n2 >= 3 with defined SDs");
    const double n1 = static_cast<double>(a.n);
    const double n2 = static_cast<double>(b.n);
    const double s1 = a.sd.value_or(0.0);
    const double s2 = b.sd.value_or(0.0);
    if (s1 == 0.0 && s2 == 0.0) throw DegenerateError("pooled_sd: both groups have zero variance");
    return std::sqrt(((n1 - 1.0) * s1 * s1 + (n2 - 1.0) * s2 * s2) / (n1 + n2 - 2.0));
}

/// Equal-variance two-sample t test of a - b; d = difference / pooled SD.
inline MeanTestResult two_sample_pooled_t(const SummaryStats& a, const SummaryStats& b, double level = 0.95) {
    detail::check_level(level);
    const double sp = pooled_sd(a, b);
    const double n1 = static_cast<double>(a.n);
    const double n2 = static_cast<double>(b.n);
    MeanTestResult r;
    r.method = "two-sample pooled t";
    r.estimate = a.mean - b.mean;
    r.pooled_sd = sp;
    r.se = std::sqrt(sp * sp * (n1 + n2) / (n1 * n2));
    r.df = n1 + n2 - 2.0;
    r.t = r.estimate / r.se;
    r.p = dist::t_p_two_tailed(r.t, r.df);
    const double q = dist::t_quantile(0.5 + level / 2.0, r.df);
    r.ci_low = r.estimate - q * r.se;
    r.ci_high = r.estimate + q * r.se;
    r.d = r.estimate / sp;
    r.magnitude = classify_magnitude(r.d);
    return r;
}

/// Unequal-variance (Welch) t test of a - b with Welch-Satterthwaite df.
/// d standardizes by sqrt((s1^2 + s2^2) / 2).
inline MeanTestResult two_sample_welch_t(const SummaryStats& a, const SummaryStats& b, double level = 0.95) {
    detail::check_level(level);
    if (a.n < 2 || b.n < 2 || !a.sd || !b.sd) throw PreconditionError("two_sample_welch_t: need n >= 2 in both groups");
    const double v1 = *a.sd * *a.sd / static_cast<double>(a.n);
    const double v2 = *b.sd * *b.sd / static_cast<double>(b.n);
    if (v1 == 0.0 && v2 == 0.0) throw DegenerateError("two_sample_welch_t: both groups have zero variance");
    MeanTestResult r;
    r.method = "two-sample Welch t";
    r.estimate = a.mean - b.mean;
    r.se = std::sqrt(v1 + v2);
    r.df = (v1 + v2) * (v1 + v2) /
           (v1 * v1 / static_cast<double>(a.n - 1) + v2 * v2 / static_cast<double>(b.n - 1));
    r.t = r.estimate / r.se;
    r.p = dist::t_p_two_tailed(r.t, r.df);
    const double q = dist::t_quantile(0.5 + level / 2.0, r.df);
    r.ci_low = r.estimate - q * r.se;
    r.ci_high = r.estimate + q * r.se;
    r.d = r.estimate / std::sqrt((*a.sd * *a.sd + *b.sd * *b.sd) / 2.0);
    r.magnitude = classify_magnitude(r.d);
    return r;
}

inline double arcsine_transform(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("proportion outside [0, 1]");
    return 2.0 * std::asin(std::sqrt(p));
}

/// Cohen's h = 2 asin(sqrt(p)) - 2 asin(sqrt(p0)).
inline double cohens_h_one(double p, double p0) { return arcsine_transform(p) - arcsine_transform(p0); }

inline void check_counts(std::size_t count, std::size_t n) {
    if (n == 0) throw PreconditionError("proportion test: n must be >= 1");
    if (count > n) throw PreconditionError("proportion test: count exceeds n");
}

/// Large-sample test of an observed share against p0: z uses the
/// null-implied SD, the Wald interval uses the observed proportion. The share
/// may be fractional (summed top-x weights over n papers).
inline ProportionTestResult one_sample_prop_z_share(double p, std::size_t n, double p0, double z_crit = kZ95) {
    if (n == 0) throw PreconditionError("proportion test: n must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("proportion test: share outside [0, 1]");
    if (!(p0 > 0.0 && p0 < 1.0)) throw PreconditionError("one_sample_prop_z: p0 must lie in (0, 1)");
    const double nn = static_cast<double>(n);
    ProportionTestResult r;
    r.method = "one-sample z (large-sample Wald CI)";
    r.estimate = p;
    r.se_test = std::sqrt(p0 * (1.0 - p0) / nn);
    r.se = std::sqrt(p * (1.0 - p) / nn);
    r.z = (p - p0) / r.se_test;
    r.p = dist::normal_p_two_tailed(r.z);
    r.ci_low = p - z_crit * r.se;
    r.ci_high = p + z_crit * r.se;
    r.h = cohens_h_one(p, p0);
    r.magnitude = classify_magnitude(r.h);
    return r;
}

inline ProportionTestResult one_sample_prop_z(std::size_t count, std::size_t n, double p0, double z_crit = kZ95) {
    check_counts(count, n);
    return one_sample_prop_z_share(static_cast<double>(count) / static_cast<double>(n), n, p0, z_crit);
}

/// Test of p1 - p2: pooled SE for z, unpooled SE for the Wald interval.
inline ProportionTestResult two_sample_prop_z_share(double p1, std::size_t n1, double p2, std::size_t n2,
                                                    double z_crit = kZ95) {
    if (n1 == 0 || n2 == 0) throw PreconditionError("proportion test: n must be >= 1");
    if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0))
        throw PreconditionError("proportion test: share outside [0, 1]");
    const double a = static_cast<double>(n1);
    const double b = static_cast<double>(n2);
    const double pooled = (p1 * a + p2 * b) / (a + b);
    if (pooled <= 0.0 || pooled >= 1.0) throw DegenerateError("two_sample_prop_z: pooled proportion is 0 or 1");
    ProportionTestResult r;
    r.method = "two-sample z (pooled test, unpooled Wald CI)";
    r.estimate = p1 - p2;
    r.se_test = std::sqrt(pooled * (1.0 - pooled) * (1.0 / a + 1.0 / b));
    r.se = std::sqrt(p1 * (1.0 - p1) / a + p2 * (1.0 - p2) / b);
    r.z = r.estimate / r.se_test;
    r.p = dist::normal_p_two_tailed(r.z);
    r.ci_low = r.estimate - z_crit * r.se;
    r.ci_high = r.estimate + z_crit * r.se;
    r.h = arcsine_transform(p1) - arcsine_transform(p2);
    r.magnitude = classify_magnitude(r.h);
    return r;
}

inline ProportionTestResult two_sample_prop_z(std::size_t count1, std::size_t n1, std::size_t count2, std::size_t n2,
                                              double z_crit = kZ95) {
    check_counts(count1, n1);
    check_counts(count2, n2);
    return two_sample_prop_z_share(static_cast<double>(count1) / static_cast<double>(n1), n1,
                                   static_cast<double>(count2) / static_cast<double>(n2), n2, z_crit);
}

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

enum class CiOverlap { Overlap, Disjoint };

/// Two 95% intervals that overlap rule out significance at .01; disjoint
/// ones establish it. Neither case says anything about the .05 level.
inline CiOverlap ci_overlap_verdict(Interval a, Interval b) {
    if (a.low > a.high || b.low > b.high) throw PreconditionError("ci_overlap_verdict: interval bounds reversed");
    return (a.high < b.low || b.high < a.low) ? CiOverlap::Disjoint : CiOverlap::Overlap;
}

inline std::string_view describe(CiOverlap v) {
    return v == CiOverlap::Overlap ? "not significant at .01" : "significant at .01";
}

} // namespace pctimpact::stats

#endif
