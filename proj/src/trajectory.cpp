#include "fpl/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fpl/errors.hpp"
#include "fpl/plf.hpp"

namespace fpl {

namespace {
constexpr double kTol = PiecewiseLinear::kTimeTol;
}

Trajectory::Trajectory(std::vector<double> times,
                       std::vector<Eigen::VectorXd> points)
    : times_(std::move(times)), points_(std::move(points)) {
  if (times_.empty() || times_.size() != points_.size())
    throw DomainError("trajectory needs matching, non-empty time and point "
                      "lists");
  if (std::abs(times_.front()) > kTol)
    throw DomainError("trajectory must start at time 0, got " +
                      std::to_string(times_.front()));
  times_.front() = 0.0;
  Eigen::Index n = points_.front().size();
  if (n == 0)
    throw DomainError("trajectory points must have at least one dimension");
  for (size_t i = 0; i < times_.size(); ++i) {
    if (std::isnan(times_[i]) || std::isinf(times_[i]))
      throw DomainError("trajectory time is not finite");
    if (i > 0 && !(times_[i - 1] < times_[i]))
      throw DomainError("trajectory times must be strictly increasing (at "
                        "sample " +
                        std::to_string(i) + ")");
    if (points_[i].size() != n)
      throw DomainError("trajectory points must share one dimension");
    if (!points_[i].allFinite())
      throw DomainError("trajectory values must be finite");
  }
}

Eigen::VectorXd Trajectory::eval(double t) const {
  if (t < 0.0) {
    if (-t > kTol)
      throw DomainError("trajectory evaluated before time 0");
    t = 0.0;
  }
  if (t > horizon()) {
    if (t - horizon() > kTol)
      throw DomainError("trajectory evaluated past its horizon " +
                        std::to_string(horizon()));
    t = horizon();
  }
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin())
    return points_.front();
  if (it == times_.end())
    return points_.back();
  size_t hi = static_cast<size_t>(it - times_.begin());
  size_t lo = hi - 1;
  double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  return points_[lo] + w * (points_[hi] - points_[lo]);
}

Trajectory Trajectory::shift(double delta) const {
  if (delta < -kTol || delta > horizon() + kTol)
    throw DomainError("shift amount " + std::to_string(delta) +
                      " outside [0, horizon]");
  delta = std::clamp(delta, 0.0, horizon());
  std::vector<double> ts;
  std::vector<Eigen::VectorXd> ps;
  ts.push_back(0.0);
  ps.push_back(eval(delta));
  for (size_t i = 0; i < times_.size(); ++i) {
    double t = times_[i] - delta;
    if (t > kTol) {
      ts.push_back(t);
      ps.push_back(points_[i]);
    }
  }
  return Trajectory(std::move(ts), std::move(ps));
}

Trajectory Trajectory::prefix(double tau) const {
  if (tau < -kTol || tau > horizon() + kTol)
    throw DomainError("prefix end " + std::to_string(tau) +
                      " outside [0, horizon]");
  tau = std::clamp(tau, 0.0, horizon());
  std::vector<double> ts;
  std::vector<Eigen::VectorXd> ps;
  for (size_t i = 0; i < times_.size() && times_[i] < tau - kTol; ++i) {
    ts.push_back(times_[i]);
    ps.push_back(points_[i]);
  }
  ts.push_back(tau);
  ps.push_back(eval(tau));
  ts.front() = 0.0;
  return Trajectory(std::move(ts), std::move(ps));
}

double Trajectory::lipschitz() const {
  double k = 0.0;
  for (size_t i = 1; i < times_.size(); ++i) {
    double dt = times_[i] - times_[i - 1];
    k = std::max(k, (points_[i] - points_[i - 1]).norm() / dt);
  }
  return k;
}

} // namespace fpl
