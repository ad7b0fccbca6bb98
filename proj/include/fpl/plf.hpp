#ifndef FPL_PLF_HPP
#define FPL_PLF_HPP

#include <cstddef>
#include <utility>
#include <vector>

namespace fpl {

/* Continuous piecewise-linear function of time, stored as breakpoints with
 * strictly increasing times. Linear interpolation between breakpoints.
 *
 * Invariants, checked on construction:
 *  - at least 2 breakpoints, or exactly 1 for a degenerate function whose
 *    domain is a single point (produced by truncation at t = 0);
 *  - times strictly increasing;
 *  - values are finite, or all +inf (the "unconstrained" variance case);
 *    mixed finite/infinite values are rejected.
 */
class PiecewiseLinear {
public:
  struct Breakpoint {
    double t;
    double v;
  };

  PiecewiseLinear() = default;
  explicit PiecewiseLinear(std::vector<Breakpoint> pts);

  /* Constant function over [t0, t1]. */
  static PiecewiseLinear constant(double t0, double t1, double value);

  double t_min() const { return pts_.front().t; }
  double t_max() const { return pts_.back().t; }
  size_t size() const { return pts_.size(); }
  const std::vector<Breakpoint> &breakpoints() const { return pts_; }

  /* True when the function is identically +inf. */
  bool is_infinite() const;

  /* Value at time t. Times within kTimeTol of either end are clamped;
   * anything further outside the domain throws DomainError. */
  double eval(double t) const;

  /* Restriction to [t_min, t]: breakpoints before t are kept and an
   * interpolated breakpoint is inserted at t unless one is already there.
   * t == t_min yields the single-breakpoint degenerate function.
   * t outside the domain (beyond tolerance) throws DomainError. */
  PiecewiseLinear restrict_to(double t) const;

  /* Largest |slope| over all segments; 0 for degenerate or infinite
   * functions. */
  double max_abs_slope() const;

  /* Smallest value over the domain (attained at a breakpoint). */
  double min_value() const;

  bool operator==(const PiecewiseLinear &other) const;

  /* Tolerance for matching evaluation times against the domain ends and
   * for deduplicating grid points. */
  static constexpr double kTimeTol = 1e-12;

private:
  std::vector<Breakpoint> pts_;
};

} // namespace fpl

#endif
