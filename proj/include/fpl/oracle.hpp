#pragma once

#include "fpl/fuzzy_path.hpp"
#include "fpl/semantics.hpp"

namespace fpl {

/* Score of one concrete path: the trajectory is matched against each
 * element's template for its truncation time, segment scores combined by
 * the aggregator. Infinite when the trajectory is too short. */
ExtendedDistance path_semantics(const Trajectory &z, const FuzzyPath &path,
                                const SemanticsConfig &cfg);

/* Reference evaluator: enumerates every path the formula admits on the
 * cfg.delta_until switch grid and keeps the best score. Exponential in
 * formula size; exists to cross-check the recursive approximator. */
ExtendedDistance oracle_semantics(const Trajectory &z, const FormulaPtr &f,
                                  const SemanticsConfig &cfg);

} // namespace fpl
