#ifndef PCTIMPACT_SYNTHETIC_HPP
#define PCTIMPACT_SYNTHETIC_HPP

// Seeded synthetic percentile data with prescribed sample moments, used for
// demonstrations and validation when only published summaries are available.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "pctimpact/citation_data.hpp"
#include "pctimpact/errors.hpp"

namespace pctimpact::synthetic {

namespace detail {

inline double beta_draw(std::mt19937_64& gen, double a, double b) {
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x = ga(gen);
    const double y = gb(gen);
    return x / (x + y);
}

// Beta shape parameters with the given mean and variance on [0, 1].
inline std::pair<double, double> beta_shape(double mean, double var) {
    const double total = mean * (1.0 - mean) / var - 1.0;
    if (!(total > 0.0) || !(mean > 0.0 && mean < 1.0)) return {0.5, 0.5};
    return {std::max(0.05, mean * total), std::max(0.05, (1.0 - mean) * total)};
}

// Affine map onto population mean `m` and population variance `var`, then
// clamp into [lo, hi]; repeated until no value needs clamping.
inline void fit_moments(std::vector<double>& v, double m, double var, double lo, double hi) {
    if (v.empty()) return;
    for (int iter = 0; iter < 500; ++iter) {
        const double n = static_cast<double>(v.size());
        const double cur_mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
        double ss = 0.0;
        for (double x : v) ss += (x - cur_mean) * (x - cur_mean);
        const double cur_var = ss / n;
        const double scale = cur_var > 0.0 ? std::sqrt(var / cur_var) : 0.0;
        bool clamped = false;
        for (double& x : v) {
            x = m + (x - cur_mean) * scale;
            if (x < lo) { x = lo; clamped = true; }
            if (x > hi) { x = hi; clamped = true; }
        }
        if (!clamped) return;
    }
    throw PreconditionError("synthetic: moments are not attainable inside the value range");
}

} // namespace detail

/// n values in [0, 100] whose sample mean and sample SD (n - 1 divisor)
/// equal the targets up to rounding.
inline std::vector<double> matched_percentiles(std::size_t n, double mean, double sd, std::uint64_t seed) {
    if (n < 2) throw PreconditionError("synthetic: need n >= 2");
    std::mt19937_64 gen(seed);
    const auto [a, b] = detail::beta_shape(mean / 100.0, sd * sd / 10000.0);
    std::vector<double> v(n);
    for (auto& x : v) x = 100.0 * detail::beta_draw(gen, a, b);
    const double nn = static_cast<double>(n);
    detail::fit_moments(v, mean, sd * sd * (nn - 1.0) / nn, 0.0, 100.0);
    return v;
}

/// Like matched_percentiles, additionally with exactly `top_count` values at
/// or below `top_x` (the inverted top-x% papers) and all others above it.
inline std::vector<double> matched_percentiles(std::size_t n, double mean, double sd, std::size_t top_count,
                                               double top_x, std::uint64_t seed) {
    if (n < 2 || top_count >= n) throw PreconditionError("synthetic: need n >= 2 and top_count < n");
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(0.0, top_x);
    std::vector<double> low(top_count);
    for (auto& x : low) x = top_x - unif(gen);  // (0, top_x]

    const double nn = static_cast<double>(n);
    const double target_sum = nn * mean;
    const double target_sq = (nn - 1.0) * sd * sd + nn * mean * mean;
    const double low_sum = std::accumulate(low.begin(), low.end(), 0.0);
    double low_sq = 0.0;
    for (double x : low) low_sq += x * x;

    const double nu = static_cast<double>(n - top_count);
    const double up_mean = (target_sum - low_sum) / nu;
    const double up_var = (target_sq - low_sq) / nu - up_mean * up_mean;
    if (!(up_var > 0.0) || !(up_mean > top_x && up_mean < 100.0))
        throw PreconditionError("synthetic: moments incompatible with the requested top-x count");

    const double range = 100.0 - top_x;
    const auto [a, b] = detail::beta_shape((up_mean - top_x) / range, up_var / (range * range));
    std::vector<double> high(n - top_count);
    for (auto& x : high) x = top_x + range * detail::beta_draw(gen, a, b);
    detail::fit_moments(high, up_mean, up_var, std::nextafter(top_x, 100.0), 100.0);

    std::vector<double> v = std::move(low);
    v.insert(v.end(), high.begin(), high.end());
    std::shuffle(v.begin(), v.end(), gen);
    return v;
}

/// Published per-institution summaries used to build the paper-like sample.
struct InstitutionProfile {
    std::string label;
    std::size_t n;
    double mean;
    double sd;
    std::size_t top10_count;
};

inline const std::vector<InstitutionProfile>& paper_profiles() {
    static const std::vector<InstitutionProfile> profiles{
        {"1", 268, 49.67, 30.66, 30},
        {"2", 549, 32.15, 27.49, 160},
        {"3", 488, 45.98, 29.40, 57},
    };
    return profiles;
}

/// A 1305-paper dataset (2001-2002) whose per-institution inverted
/// percentiles reproduce the published means, SDs and top-10% counts.
/// Citation counts decrease with the percentile.
inline Dataset paper_like_dataset(std::uint64_t seed = 2013) {
    static const std::vector<std::string> categories{"PHYS_CM", "CHEM_PH", "BIOCHEM", "MATH_AP", "ENG_EL"};
    std::vector<PublicationRecord> records;
    std::size_t serial = 0;
    for (const auto& prof : paper_profiles()) {
        const auto pct = matched_percentiles(prof.n, prof.mean, prof.sd, prof.top10_count, 10.0, seed + serial);
        for (std::size_t i = 0; i < pct.size(); ++i, ++serial) {
            PublicationRecord r;
            r.id = "P" + std::to_string(serial + 1);
            r.institution = prof.label;
            r.pub_year = 2001 + static_cast<int>(serial % 2);
            r.categories = {categories[serial % categories.size()]};
            r.citations = static_cast<std::int64_t>(std::llround(80.0 * std::pow(1.0 - pct[i] / 100.0, 3)));
            r.inv_percentile = pct[i];
            records.push_back(std::move(r));
        }
    }
    return Dataset(std::move(records));
}

} // namespace pctimpact::synthetic

#endif
