#ifndef PCTIMPACT_PCTIMPACT_HPP
#define PCTIMPACT_PCTIMPACT_HPP

#include "pctimpact/errors.hpp"
#include "pctimpact/distributions.hpp"
#include "pctimpact/citation_data.hpp"
#include "pctimpact/percentile.hpp"
#include "pctimpact/effect_stats.hpp"
#include "pctimpact/resampling.hpp"
#include "pctimpact/report.hpp"
#include "pctimpact/synthetic.hpp"
#include "pctimpact/analysis.hpp"

#endif
