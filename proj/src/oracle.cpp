#include "fpl/oracle.hpp"

#include <algorithm>

#include "fpl/errors.hpp"
#include "fpl/normalize.hpp"
#include "fpl/plf.hpp"

namespace fpl {

namespace {
constexpr double kTol = PiecewiseLinear::kTimeTol;
}

ExtendedDistance path_semantics(const Trajectory &z, const FuzzyPath &path,
                                const SemanticsConfig &cfg) {
  ExtendedDistance total(0.0);
  Trajectory cur = z;
  for (const PathElement &e : path.elements) {
    if (e.ref.dim() != z.dim())
      throw DomainError("trajectory dimension does not match the path");
    if (cur.horizon() < e.trunc - kTol)
      return ExtendedDistance::infinity();
    ExtendedDistance x = atom_semantics(cur, e.ref, cfg, e.trunc);
    total = cfg.aggregator == Aggregator::Max ? max(total, x) : total + x;
    cur = cur.shift(std::min(e.trunc, cur.horizon()));
  }
  return total;
}

ExtendedDistance oracle_semantics(const Trajectory &z, const FormulaPtr &f,
                                  const SemanticsConfig &cfg) {
  if (z.dim() != f->dim())
    throw DomainError("trajectory dimension does not match the formula");
  if (!(cfg.delta_atom > 0))
    throw DomainError("delta_atom must be positive");
  ExtendedDistance best = ExtendedDistance::infinity();
  for (const FuzzyPath &p : fuzzy_paths(f, cfg.delta_until))
    best = min(best, path_semantics(z, p, cfg));
  return best;
}

} // namespace fpl
