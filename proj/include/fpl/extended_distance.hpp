#ifndef FPL_EXTENDED_DISTANCE_HPP
#define FPL_EXTENDED_DISTANCE_HPP

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace fpl {

/* A distance value in [0, +inf]. +inf marks infeasible matches (trajectory
 * too short for the formula). Closed under min, max and addition; never NaN. */
class ExtendedDistance {
public:
  ExtendedDistance() : v_(0.0) {}
  explicit ExtendedDistance(double v) : v_(v) {
    assert(v >= 0.0 && !std::isnan(v));
  }

  static ExtendedDistance infinity() {
    return ExtendedDistance(std::numeric_limits<double>::infinity());
  }

  double value() const { return v_; }
  bool is_infinite() const { return std::isinf(v_); }
  bool is_finite() const { return !std::isinf(v_); }

  friend ExtendedDistance operator+(ExtendedDistance a, ExtendedDistance b) {
    return ExtendedDistance(a.v_ + b.v_);
  }
  friend bool operator==(ExtendedDistance a, ExtendedDistance b) {
    return a.v_ == b.v_;
  }
  friend bool operator<(ExtendedDistance a, ExtendedDistance b) {
    return a.v_ < b.v_;
  }
  friend bool operator<=(ExtendedDistance a, ExtendedDistance b) {
    return a.v_ <= b.v_;
  }

  friend ExtendedDistance min(ExtendedDistance a, ExtendedDistance b) {
    return a.v_ < b.v_ ? a : b;
  }
  friend ExtendedDistance max(ExtendedDistance a, ExtendedDistance b) {
    return a.v_ < b.v_ ? b : a;
  }

private:
  double v_;
};

} // namespace fpl

#endif
