#include "fpl/plf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fpl/errors.hpp"

namespace fpl {

namespace {

bool plus_inf(double v) {
  return std::isinf(v) && v > 0;
}

} // namespace

PiecewiseLinear::PiecewiseLinear(std::vector<Breakpoint> pts)
    : pts_(std::move(pts)) {
  if (pts_.empty())
    throw DomainError("piecewise-linear function needs at least 1 breakpoint");
  size_t inf_count = 0;
  for (size_t i = 0; i < pts_.size(); ++i) {
    const auto &p = pts_[i];
    if (std::isnan(p.t) || std::isinf(p.t) || std::isnan(p.v))
      throw DomainError("piecewise-linear breakpoint is NaN or has "
                        "non-finite time");
    if (std::isinf(p.v)) {
      if (p.v < 0)
        throw DomainError("piecewise-linear value is -inf");
      ++inf_count;
    }
    if (i > 0 && !(pts_[i - 1].t < p.t))
      throw DomainError("piecewise-linear times must be strictly increasing "
                        "(offending time " +
                        std::to_string(p.t) + ")");
  }
  if (inf_count != 0 && inf_count != pts_.size())
    throw DomainError("piecewise-linear values must be all finite or all "
                      "+inf");
}

PiecewiseLinear PiecewiseLinear::constant(double t0, double t1, double value) {
  if (t0 == t1)
    return PiecewiseLinear({{t0, value}});
  return PiecewiseLinear({{t0, value}, {t1, value}});
}

bool PiecewiseLinear::is_infinite() const {
  return plus_inf(pts_.front().v);
}

double PiecewiseLinear::eval(double t) const {
  if (t < pts_.front().t) {
    if (pts_.front().t - t > kTimeTol)
      throw DomainError("evaluation time " + std::to_string(t) +
                        " before domain start " +
                        std::to_string(pts_.front().t));
    t = pts_.front().t;
  }
  if (t > pts_.back().t) {
    if (t - pts_.back().t > kTimeTol)
      throw DomainError("evaluation time " + std::to_string(t) +
                        " after domain end " + std::to_string(pts_.back().t));
    t = pts_.back().t;
  }
  if (is_infinite())
    return std::numeric_limits<double>::infinity();
  auto it = std::upper_bound(
      pts_.begin(), pts_.end(), t,
      [](double lhs, const Breakpoint &p) { return lhs < p.t; });
  if (it == pts_.begin())
    return pts_.front().v;
  if (it == pts_.end())
    return pts_.back().v;
  const Breakpoint &hi = *it;
  const Breakpoint &lo = *(it - 1);
  double w = (t - lo.t) / (hi.t - lo.t);
  return lo.v + w * (hi.v - lo.v);
}

PiecewiseLinear PiecewiseLinear::restrict_to(double t) const {
  if (t > pts_.back().t + kTimeTol || t < pts_.front().t - kTimeTol)
    throw DomainError("restriction point " + std::to_string(t) +
                      " outside domain");
  t = std::clamp(t, pts_.front().t, pts_.back().t);
  std::vector<Breakpoint> out;
  for (const auto &p : pts_) {
    if (p.t < t - kTimeTol)
      out.push_back(p);
    else
      break;
  }
  out.push_back({t, eval(t)});
  return PiecewiseLinear(std::move(out));
}

double PiecewiseLinear::max_abs_slope() const {
  if (pts_.size() < 2 || is_infinite())
    return 0.0;
  double m = 0.0;
  for (size_t i = 1; i < pts_.size(); ++i) {
    double s = std::abs((pts_[i].v - pts_[i - 1].v) /
                        (pts_[i].t - pts_[i - 1].t));
    m = std::max(m, s);
  }
  return m;
}

double PiecewiseLinear::min_value() const {
  double m = pts_.front().v;
  for (const auto &p : pts_)
    m = std::min(m, p.v);
  return m;
}

bool PiecewiseLinear::operator==(const PiecewiseLinear &other) const {
  if (pts_.size() != other.pts_.size())
    return false;
  for (size_t i = 0; i < pts_.size(); ++i)
    if (pts_[i].t != other.pts_[i].t || pts_[i].v != other.pts_[i].v)
      return false;
  return true;
}

} // namespace fpl
