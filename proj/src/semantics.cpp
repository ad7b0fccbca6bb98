#include "fpl/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fpl/errors.hpp"
#include "fpl/normalize.hpp"
#include "fpl/plf.hpp"

namespace fpl {

Aggregator aggregator_from_name(const std::string &name) {
  if (name == "max")
    return Aggregator::Max;
  if (name == "int")
    return Aggregator::Int;
  throw DomainError("unknown aggregator: " + name);
}

std::string aggregator_name(Aggregator agg) {
  return agg == Aggregator::Max ? "max" : "int";
}

namespace {

constexpr double kTol = PiecewiseLinear::kTimeTol;

ExtendedDistance combine(Aggregator agg, ExtendedDistance a,
                         ExtendedDistance b) {
  return agg == Aggregator::Max ? max(a, b) : a + b;
}

} // namespace

std::vector<double>
until_switch_times(double tau, double delta,
                   const std::optional<UntilInterval> &iv) {
  std::vector<double> s;
  for (long m = 0;; ++m) {
    double t = static_cast<double>(m) * delta;
    if (t >= tau - kTol)
      break;
    s.push_back(t);
  }
  s.push_back(tau);
  if (iv) {
    double lo = std::min(iv->lo, tau);
    double hi = std::min(iv->hi, tau);
    std::vector<double> narrowed;
    for (double t : s)
      if (t >= lo - kTol && t <= hi + kTol)
        narrowed.push_back(t);
    narrowed.push_back(lo);
    narrowed.push_back(hi);
    narrowed.push_back(tau);
    std::sort(narrowed.begin(), narrowed.end());
    s.clear();
    for (double t : narrowed)
      if (s.empty() || t - s.back() > kTol)
        s.push_back(t);
  }
  return s;
}

namespace {

ExtendedDistance eval(const Trajectory &z, const Formula &f,
                      const SemanticsConfig &cfg) {
  switch (f.kind()) {
  case Formula::Kind::Leaf: {
    if (f.leaf_ref().horizon() > z.horizon() + kTol)
      return ExtendedDistance::infinity();
    return atom_semantics(z, f.leaf_ref(), cfg);
  }
  case Formula::Kind::Or:
    return min(eval(z, *f.left(), cfg), eval(z, *f.right(), cfg));
  case Formula::Kind::Concat: {
    const AtomRef &head = f.left()->leaf_ref();
    double tau = head.horizon();
    if (tau > z.horizon() + kTol)
      return ExtendedDistance::infinity();
    ExtendedDistance x1 = atom_semantics(z, head, cfg);
    ExtendedDistance x2 =
        eval(z.shift(std::min(tau, z.horizon())), *f.right(), cfg);
    return combine(cfg.aggregator, x1, x2);
  }
  case Formula::Kind::Until: {
    const AtomRef &head = f.left()->leaf_ref();
    ExtendedDistance best = ExtendedDistance::infinity();
    for (double t : until_switch_times(head.horizon(), cfg.delta_until,
                                       f.until_interval())) {
      if (t > z.horizon() + kTol) // undefined switch point, worth infinity
        continue;
      ExtendedDistance x1 = atom_semantics(z, head, cfg, t);
      ExtendedDistance x2 =
          eval(z.shift(std::min(t, z.horizon())), *f.right(), cfg);
      best = min(best, combine(cfg.aggregator, x1, x2));
    }
    return best;
  }
  }
  throw Error("unreachable formula kind");
}

void validate(const Trajectory &z, const FormulaPtr &n,
              const SemanticsConfig &cfg) {
  if (z.dim() != n->dim())
    throw DomainError("trajectory dimension does not match the formula");
  if (!(cfg.delta_atom > 0))
    throw DomainError("delta_atom must be positive");
  if (count_until(n) > 0) {
    if (!(cfg.delta_until > 0) || cfg.delta_until >= h_min(n))
      throw DomainError(
          "delta_until must lie in (0, h_min) for formulas with until");
  }
}

} // namespace

ExtendedDistance atom_semantics(const Trajectory &z, const AtomRef &ref,
                                const SemanticsConfig &cfg) {
  return atom_semantics(z, ref, cfg, ref.horizon());
}

ExtendedDistance atom_semantics(const Trajectory &z, const AtomRef &ref,
                                const SemanticsConfig &cfg,
                                double eval_horizon) {
  if (z.horizon() < eval_horizon - kTol)
    return ExtendedDistance::infinity();
  DistanceCurve curve =
      distance_curve(z, ref, cfg.delta_atom, cfg.metric, eval_horizon);
  if (cfg.aggregator == Aggregator::Max)
    return ExtendedDistance(curve.max_value());
  return ExtendedDistance(curve.trapezoid());
}

ExtendedDistance compute_semantics(const Trajectory &z, const FormulaPtr &f,
                                   const SemanticsConfig &cfg) {
  FormulaPtr n = is_lnf(f) ? f : to_lnf(f);
  validate(z, n, cfg);
  return eval(z, *n, cfg);
}

BoundConstants estimate_constants(const Trajectory &z, const FormulaPtr &f,
                                  const SemanticsConfig &cfg) {
  BoundConstants out;
  out.traj_slope = z.lipschitz();
  double nu = z.horizon();
  for (const AtomRef &ref : collect_atoms(f)) {
    double tau = ref.horizon();

    // probe grid: ten points per switch step, plus every breakpoint,
    // where the piecewise-linear pieces attain their extreme slopes
    std::vector<double> grid;
    long n = 10 * static_cast<long>(std::ceil(tau / cfg.delta_until)) + 1;
    n = std::max(n, 2l);
    for (long i = 0; i <= n; ++i)
      grid.push_back(tau * static_cast<double>(i) / static_cast<double>(n));
    if (!ref.is_top())
      for (double t : ref.atom()->breakpoint_times())
        grid.push_back(t);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return b - a <= kTol; }),
               grid.end());

    double spatial = 0.0;
    for (double t : grid)
      spatial = std::max(spatial, spatial_lipschitz(ref, t, cfg.metric));

    // temporal slope of the distance, probed at the trajectory samples
    double temporal = 0.0;
    for (size_t p = 0; p < z.sample_count(); ++p) {
      double prev_d = point_distance(z.point(p), ref, grid.front(),
                                     cfg.metric);
      for (size_t i = 1; i < grid.size(); ++i) {
        double cur_d = point_distance(z.point(p), ref, grid[i], cfg.metric);
        temporal = std::max(temporal, std::abs(cur_d - prev_d) /
                                          (grid[i] - grid[i - 1]));
        prev_d = cur_d;
      }
    }

    double d0 = point_distance(z.eval(0.0), ref, 0.0, cfg.metric);
    double kz = out.traj_slope;
    out.c = std::max(out.c, spatial * kz);
    out.c2 = std::max(out.c2, spatial * kz + temporal);
    out.c1 = std::max(out.c1,
                      d0 + (temporal + kz * spatial) * std::min(nu, tau));
  }
  return out;
}

double error_bound(const FormulaPtr &f, const Trajectory &z,
                   const SemanticsConfig &cfg, const BoundConstants &k) {
  FormulaPtr n = is_lnf(f) ? f : to_lnf(f);
  int ku = count_until(n);
  int kcu = count_concat_until(n);
  int relevant = cfg.aggregator == Aggregator::Max ? ku : kcu;
  if (relevant > 0 &&
      (!(cfg.delta_until > 0) || cfg.delta_until >= h_min(n)))
    throw DomainError(
        "delta_until must lie in (0, h_min) for a meaningful bound");
  if (cfg.aggregator == Aggregator::Max)
    return ku * (k.c2 + k.c) * cfg.delta_until;
  return kcu * (k.c1 + kcu * k.c * z.horizon()) * cfg.delta_until;
}

double error_bound(const FormulaPtr &f, const Trajectory &z,
                   const SemanticsConfig &cfg) {
  return error_bound(f, z, cfg, estimate_constants(z, f, cfg));
}

double quadrature_bound(const FormulaPtr &f, const Trajectory &z,
                        const SemanticsConfig &cfg, const BoundConstants &k) {
  (void)f;
  double span = cfg.aggregator == Aggregator::Int ? z.horizon() : 1.0;
  return k.c2 * cfg.delta_atom * span;
}

double quadrature_bound(const FormulaPtr &f, const Trajectory &z,
                        const SemanticsConfig &cfg) {
  return quadrature_bound(f, z, cfg, estimate_constants(z, f, cfg));
}

} // namespace fpl
