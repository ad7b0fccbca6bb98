#pragma once

#include <string>

#include "fpl/extended_distance.hpp"
#include "fpl/formula.hpp"
#include "fpl/metrics.hpp"
#include "fpl/trajectory.hpp"

namespace fpl {

/* How distances along a path are combined: worst case or accumulated. */
enum class Aggregator { Max, Int };

Aggregator aggregator_from_name(const std::string &name);
std::string aggregator_name(Aggregator agg);

struct SemanticsConfig {
  MetricKind metric = MetricKind::Mahalanobis;
  Aggregator aggregator = Aggregator::Max;
  double delta_until = 0.1; // switch-time discretization step
  double delta_atom = 0.01; // sampling step inside a template
};

/* The switch times an until explores: multiples of delta below tau plus
 * tau itself. A learned window narrows the grid to [lo, hi], but its
 * clamped endpoints and tau always stay available. */
std::vector<double>
until_switch_times(double tau, double delta,
                   const std::optional<UntilInterval> &window);

/* Distance of the trajectory to one template over [0, eval_horizon]
 * (defaults to the template's full horizon). Infinite when the
 * trajectory is shorter than the evaluation window. */
ExtendedDistance atom_semantics(const Trajectory &z, const AtomRef &ref,
                                const SemanticsConfig &cfg);
ExtendedDistance atom_semantics(const Trajectory &z, const AtomRef &ref,
                                const SemanticsConfig &cfg,
                                double eval_horizon);

/* Recursive approximator over the formula's normal form. */
ExtendedDistance compute_semantics(const Trajectory &z, const FormulaPtr &f,
                                   const SemanticsConfig &cfg);

/* Empirically estimated slope constants feeding the error bounds. */
struct BoundConstants {
  double traj_slope = 0;   // largest speed of the trajectory
  double c = 0;            // spatial d-slope x trajectory speed (worst template)
  double c1 = 0;           // initial distance plus drift over the window
  double c2 = 0;           // combined spatial and temporal d-slope
};

BoundConstants estimate_constants(const Trajectory &z, const FormulaPtr &f,
                                  const SemanticsConfig &cfg);

/* Switch-discretization error: linear in delta_until. */
double error_bound(const FormulaPtr &f, const Trajectory &z,
                   const SemanticsConfig &cfg, const BoundConstants &k);
double error_bound(const FormulaPtr &f, const Trajectory &z,
                   const SemanticsConfig &cfg);

/* Within-template sampling error: linear in delta_atom. */
double quadrature_bound(const FormulaPtr &f, const Trajectory &z,
                        const SemanticsConfig &cfg, const BoundConstants &k);
double quadrature_bound(const FormulaPtr &f, const Trajectory &z,
                        const SemanticsConfig &cfg);

} // namespace fpl
