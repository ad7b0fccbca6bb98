#ifndef FPL_METRICS_HPP
#define FPL_METRICS_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "fpl/atom.hpp"
#include "fpl/trajectory.hpp"

namespace fpl {

/* Point-to-template distance families.
 *
 * Mahalanobis      sqrt((x-m)' C^-1 (x-m)); with a diagonal covariance,
 *                  dimensions of infinite variance contribute nothing.
 * MahalanobisInf   max_i |x_i - m_i| / std_i, the max-norm variant
 *                  (diagonal entries are used when the covariance is
 *                  full).
 * QuantileUniform  max_i |2 F_i(x_i) - 1| with F the CDF of a uniform
 *                  distribution of matching mean/std (half-width
 *                  sqrt(3)*std). Diagonal covariance only. Saturates at 1.
 * QuantileTriangular  same with a symmetric triangular distribution
 *                  (half-width sqrt(6)*std). Diagonal covariance only.
 * Euclidean        |x - m|, covariance ignored.
 *
 * Every family reports 0 against top. */
enum class MetricKind {
  Mahalanobis,
  MahalanobisInf,
  QuantileUniform,
  QuantileTriangular,
  Euclidean,
};

MetricKind metric_from_name(const std::string &name);
std::string metric_name(MetricKind kind);

/* Distance from point x to the template at template-time t.
 * Throws DomainError for dimension mismatch, t outside [0, horizon], or a
 * quantile metric on a full covariance; SingularCovariance when a full
 * covariance is numerically singular at t (condition number above 1e12). */
double point_distance(const Eigen::VectorXd &x, const AtomRef &ref, double t,
                      MetricKind kind);

/* Smallest L we can certify with |d(x,t) - d(y,t)| <= L |x - y| for all
 * x, y at this fixed t. */
double spatial_lipschitz(const AtomRef &ref, double t, MetricKind kind);

/* d(z(t), template(t)) sampled on the refined grid: multiples of step
 * joined with the trajectory sample times and template breakpoints within
 * [0, horizon], always including 0 and the horizon. The values are exact
 * point distances; only aggregation over the grid is approximate.
 * Needs z.horizon() >= template horizon. */
struct DistanceCurve {
  std::vector<double> times;
  std::vector<double> values;

  double max_value() const;
  double trapezoid() const;
};

DistanceCurve distance_curve(const Trajectory &z, const AtomRef &ref,
                             double step, MetricKind kind);

/* Same, but only over [0, eval_horizon] (eval_horizon <= template
 * horizon), for evaluating a truncation without copying the template. */
DistanceCurve distance_curve(const Trajectory &z, const AtomRef &ref,
                             double step, MetricKind kind,
                             double eval_horizon);

} // namespace fpl

#endif
