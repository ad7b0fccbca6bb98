#ifndef FPL_ATOM_HPP
#define FPL_ATOM_HPP

#include <Eigen/Core>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "fpl/plf.hpp"

namespace fpl {

/* Diagonal covariance: one variance function per dimension. Each entry is
 * positive everywhere, or identically +inf for an unconstrained dimension. */
struct DiagonalCovariance {
  std::vector<PiecewiseLinear> variances;
};

/* Full covariance: n*n entries, row-major. Symmetric, positive definite at
 * every breakpoint (and hence, by convexity of the PD cone, everywhere).
 * Infinite entries are not allowed here. */
struct FullCovariance {
  int dim = 0;
  std::vector<PiecewiseLinear> entries; // entries[i * dim + j]

  const PiecewiseLinear &at(int i, int j) const {
    return entries[static_cast<size_t>(i) * dim + j];
  }
  Eigen::MatrixXd eval(double t) const;
};

using Covariance = std::variant<DiagonalCovariance, FullCovariance>;

/* Time-varying Gaussian template <mean, covariance> over [0, horizon].
 * Mean and covariance entries share that domain. Immutable after
 * construction; truncation returns a new atom. */
class Atom {
public:
  Atom(std::string name, std::vector<PiecewiseLinear> mean, Covariance cov);

  const std::string &name() const { return name_; }
  int dim() const { return static_cast<int>(mean_.size()); }
  double horizon() const { return mean_.front().t_max(); }
  const std::vector<PiecewiseLinear> &mean() const { return mean_; }
  const Covariance &covariance() const { return cov_; }
  bool has_diagonal_covariance() const {
    return std::holds_alternative<DiagonalCovariance>(cov_);
  }

  Eigen::VectorXd mean_at(double t) const;

  /* Per-dimension variances at t; only for diagonal covariance. */
  Eigen::VectorXd diagonal_variances_at(double t) const;

  /* Restriction to [0, t], t in [0, horizon]. t = 0 gives the degenerate
   * point atom. */
  Atom truncate(double t) const;

  /* Sorted, deduplicated union of breakpoint times of all components,
   * clipped to [0, horizon]. */
  std::vector<double> breakpoint_times() const;

private:
  std::string name_;
  std::vector<PiecewiseLinear> mean_;
  Covariance cov_;
};

/* The always-satisfied template over [0, horizon]: distance 0 to any point
 * of matching dimension. Kept distinct from Atom so nothing ever asks it
 * for a covariance. */
struct TopAtom {
  double horizon = 0.0;
  int dim = 0;
};

/* One building block of a fuzzy path: a concrete atom or top. Atoms are
 * shared, never copied, so identity survives normalization rewrites. */
class AtomRef {
public:
  AtomRef(std::shared_ptr<const Atom> atom) : ref_(std::move(atom)) {}
  AtomRef(TopAtom top) : ref_(top) {}

  bool is_top() const { return std::holds_alternative<TopAtom>(ref_); }
  const TopAtom &top() const { return std::get<TopAtom>(ref_); }
  const std::shared_ptr<const Atom> &atom() const {
    return std::get<std::shared_ptr<const Atom>>(ref_);
  }

  double horizon() const {
    return is_top() ? top().horizon : atom()->horizon();
  }
  int dim() const { return is_top() ? top().dim : atom()->dim(); }

  /* Stable identity for set comparisons: the shared atom object, or a
   * null marker for top (tops compare by value instead). */
  const void *identity() const {
    return is_top() ? nullptr : static_cast<const void *>(atom().get());
  }

private:
  std::variant<std::shared_ptr<const Atom>, TopAtom> ref_;
};

} // namespace fpl

#endif
