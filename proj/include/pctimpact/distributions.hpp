#ifndef PCTIMPACT_DISTRIBUTIONS_HPP
#define PCTIMPACT_DISTRIBUTIONS_HPP

// Normal and Student t distribution kernels backing every p-value and
// confidence interval in the library, on top of Boost.Math.

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "pctimpact/errors.hpp"

namespace pctimpact::dist {

inline void check_df(double df) {
    if (!(df > 0) || !std::isfinite(df)) throw PreconditionError("t distribution: df must be positive and finite");
}

inline void check_probability(double q, const char* who) {
    if (!(q > 0.0 && q < 1.0)) throw PreconditionError(std::string(who) + ": q must lie in (0, 1)");
}

inline double normal_pdf(double x) { return boost::math::pdf(boost::math::normal_distribution<double>(), x); }

inline double normal_cdf(double x) {
    if (std::isnan(x)) throw PreconditionError("normal_cdf: x is NaN");
    return boost::math::cdf(boost::math::normal_distribution<double>(), x);
}

/// Upper tail 1 - Phi(x), accurate far into the tail.
inline double normal_sf(double x) {
    if (std::isnan(x)) throw PreconditionError("normal_sf: x is NaN");
    return boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(), x));
}

inline double normal_quantile(double q) {
    check_probability(q, "normal_quantile");
    return boost::math::quantile(boost::math::normal_distribution<double>(), q);
}

inline double t_pdf(double x, double df) {
    check_df(df);
    return boost::math::pdf(boost::math::students_t_distribution<double>(df), x);
}

/// Upper tail P(T > x) for Student's t with `df` degrees of freedom.
inline double t_sf(double x, double df) {
    check_df(df);
    if (std::isnan(x)) throw PreconditionError("t_sf: x is NaN");
    if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::students_t_distribution<double>(df), x));
}

inline double t_cdf(double x, double df) { return t_sf(-x, df); }

inline double t_quantile(double q, double df) {
    check_df(df);
    check_probability(q, "t_quantile");
    return boost::math::quantile(boost::math::students_t_distribution<double>(df), q);
}

/// Two-tailed p-value for a t statistic.
inline double t_p_two_tailed(double t, double df) { return std::min(1.0, 2.0 * t_sf(std::fabs(t), df)); }

/// Two-tailed p-value for a z statistic.
inline double normal_p_two_tailed(double z) { return std::min(1.0, 2.0 * normal_sf(std::fabs(z))); }

} // namespace pctimpact::dist

#endif
