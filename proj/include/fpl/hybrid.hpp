#ifndef FPL_HYBRID_HPP
#define FPL_HYBRID_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "fpl/extended_distance.hpp"
#include "fpl/formula.hpp"
#include "fpl/plf.hpp"
#include "fpl/semantics.hpp"
#include "fpl/trajectory.hpp"

namespace fpl {

/* One mode of the automaton: a fixed piecewise-linear signal evolution in
 * absolute coordinates over [0, max_dwell], relative to mode entry. */
struct HybridLocation {
  std::string name;
  std::vector<PiecewiseLinear> evolution;
  double max_dwell = 0.0;
};

/* Discrete transition, takeable only at the listed dwell times (strictly
 * ascending, positive, within the source's dwell). */
struct HybridEdge {
  int from = 0;
  int to = 0;
  std::string action;
  std::vector<double> jump_times;
};

/* Hybrid automaton restricted enough to admit finitely many runs: one
 * fixed evolution per location, jumps at listed times only, no resets.
 * Signals must be continuous across every jump (exit value of the source
 * evolution equals entry value of the target's, within 1e-9); construction
 * validates this together with the shape of every field. */
class RestrictedHybridAutomaton {
public:
  RestrictedHybridAutomaton(std::vector<HybridLocation> locations,
                            std::vector<HybridEdge> edges, int init_location,
                            Eigen::VectorXd init_point, double horizon);

  const std::vector<HybridLocation> &locations() const { return locations_; }
  const std::vector<HybridEdge> &edges() const { return edges_; }
  int init_location() const { return init_location_; }
  const Eigen::VectorXd &init_point() const { return init_point_; }
  double horizon() const { return horizon_; }
  int dim() const { return static_cast<int>(init_point_.size()); }

private:
  std::vector<HybridLocation> locations_;
  std::vector<HybridEdge> edges_;
  int init_location_;
  Eigen::VectorXd init_point_;
  double horizon_;
};

/* Parse the automaton JSON:
 *   {"locations": [{"name", "evolution": [plf, ...], "maxDwell"}, ...],
 *    "edges": [{"from", "to", "action", "jumpTimes": [...]}, ...],
 *    "init": {"location", "point": [...]},
 *    "horizon"}
 * where plf = [[t, v], ...] and edges refer to locations by name. */
RestrictedHybridAutomaton parse_automaton(const std::string &json_text);

/* Every run of exactly the given horizon, depth-first: at each visited
 * location either dwell out the remaining time (when it fits the location's
 * max dwell) or take an edge at one of its listed times before the horizon.
 * Deterministic order: dwell-out first, then edges in declaration order,
 * each at ascending jump times. Throws CapacityError past cap. */
std::vector<Trajectory> enumerate_runs(const RestrictedHybridAutomaton &ha,
                                       double horizon, int cap);

struct ModelCheckResult {
  bool all_within = false; // every run within threshold plus its bound
  int worst_run = -1;      // largest distance (first such run)
  int best_run = -1;       // smallest distance (first such run)
  std::vector<ExtendedDistance> distances;
  std::vector<double> bounds; // switch plus sampling error bound per run
};

/* Evaluates the formula on every enumerated run. A run counts as within
 * when its distance stays under the threshold plus its own reported error
 * bound, so the verdict never blames discretization error on the run. */
ModelCheckResult model_check(const RestrictedHybridAutomaton &ha,
                             const FormulaPtr &f, ExtendedDistance threshold,
                             const SemanticsConfig &cfg, int cap = 10000);

} // namespace fpl

#endif
