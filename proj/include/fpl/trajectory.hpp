#ifndef FPL_TRAJECTORY_HPP
#define FPL_TRAJECTORY_HPP

#include <Eigen/Core>
#include <vector>

namespace fpl {

/* A sampled signal over [0, horizon], linearly interpolated between
 * samples. Sample times start at exactly 0 and increase strictly; a single
 * sample gives the degenerate point trajectory over [0, 0] (these arise
 * from shifting a trajectory by its full horizon).
 */
class Trajectory {
public:
  Trajectory(std::vector<double> times, std::vector<Eigen::VectorXd> points);

  int dim() const { return static_cast<int>(points_.front().size()); }
  double horizon() const { return times_.back(); }
  size_t sample_count() const { return times_.size(); }
  const std::vector<double> &times() const { return times_; }
  const Eigen::VectorXd &point(size_t i) const { return points_[i]; }

  /* Interpolated value at t in [0, horizon] (ends matched within 1e-12). */
  Eigen::VectorXd eval(double t) const;

  /* Suffix starting at delta, re-based to time 0: the trajectory
   * t -> eval(t + delta) over [0, horizon - delta]. Resamples at the
   * original sample times past delta. delta in [0, horizon]. */
  Trajectory shift(double delta) const;

  /* Prefix over [0, tau] (tau in [0, horizon]); inserts an interpolated
   * final sample at tau when needed. */
  Trajectory prefix(double tau) const;

  /* Smallest Lipschitz constant of the interpolant: max over segments of
   * |point step| / |time step|. 0 for the degenerate trajectory. */
  double lipschitz() const;

private:
  std::vector<double> times_;
  std::vector<Eigen::VectorXd> points_;
};

} // namespace fpl

#endif
