#ifndef FPL_NORMALIZE_HPP
#define FPL_NORMALIZE_HPP

#include <vector>

#include "fpl/formula.hpp"
#include "fpl/fuzzy_path.hpp"

namespace fpl {

/* Rewrite into left normal form: every Concat and Until left operand is a
 * single atom or top. Uses the distribution identities
 *   (f1 | f2) . f3 == (f1 . f3) | (f2 . f3)
 *   (f1 . f2) . f3 == f1 . (f2 . f3)
 *   (f1 U f2) . f3 == f1 U (f2 . f3)
 *   (f1 | f2) U f3 == (f1 U f3) | (f2 U f3)
 *   (f1 . f2) U f3 == (f1 U f3) | (f1 . (f2 U f3))
 *   (f1 U f2) U f3 == f1 U (f2 U f3)
 * bottom-up. The set of admitted fuzzy paths is preserved exactly.
 * Throws CapacityError once the rewrite has created more than 10000
 * nodes. Until switch intervals are kept where the switch clock is
 * unchanged (identities 3, 4, and the first disjunct of 5; identity 6
 * keeps the inner until's interval on the new outer until) and dropped
 * where it is re-based. */
FormulaPtr to_lnf(const FormulaPtr &f);

/* Every fuzzy path the formula admits, with Until switch times drawn from
 * a grid of the given step. Truncation candidates of a path prefix are
 * enumerated per element: full elements before i, then element i cut at
 * {0, grid, 2*grid, ...} up to and including its truncation time. The
 * grid is re-anchored at each element boundary, which makes the result an
 * LNF invariant (normalizing first never changes the set).
 *
 * The result is deduplicated and canonically ordered. Throws
 * CapacityError beyond 1e6 paths. */
std::vector<FuzzyPath> fuzzy_paths(const FormulaPtr &f, double grid);

} // namespace fpl

#endif
