#include "fpl/atom.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "fpl/errors.hpp"

namespace fpl {

namespace {

constexpr double kTol = PiecewiseLinear::kTimeTol;

void require_domain(const PiecewiseLinear &f, double horizon,
                    const std::string &what) {
  if (std::abs(f.t_min()) > kTol)
    throw DomainError(what + " must start at time 0");
  if (std::abs(f.t_max() - horizon) > kTol)
    throw DomainError(what + " domain end differs from the atom horizon");
}

} // namespace

Eigen::MatrixXd FullCovariance::eval(double t) const {
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      m(i, j) = at(i, j).eval(t);
  return m;
}

Atom::Atom(std::string name, std::vector<PiecewiseLinear> mean, Covariance cov)
    : name_(std::move(name)), mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.empty())
    throw DomainError("atom needs at least one mean component");
  double tau = mean_.front().t_max();
  for (const auto &m : mean_) {
    require_domain(m, tau, "atom mean component");
    if (m.is_infinite())
      throw DomainError("atom mean must be finite");
  }
  int n = dim();
  if (const auto *d = std::get_if<DiagonalCovariance>(&cov_)) {
    if (static_cast<int>(d->variances.size()) != n)
      throw DomainError("diagonal covariance size differs from atom "
                        "dimension");
    for (const auto &v : d->variances) {
      require_domain(v, tau, "variance component");
      if (!v.is_infinite() && v.min_value() <= 0.0)
        throw DomainError("variances must be positive (or identically "
                          "+inf)");
    }
  } else {
    const auto &f = std::get<FullCovariance>(cov_);
    if (f.dim != n ||
        f.entries.size() != static_cast<size_t>(n) * static_cast<size_t>(n))
      throw DomainError("full covariance size differs from atom dimension");
    std::set<double> grid;
    for (const auto &e : f.entries) {
      require_domain(e, tau, "covariance entry");
      if (e.is_infinite())
        throw DomainError("full covariance entries must be finite");
      for (const auto &p : e.breakpoints())
        grid.insert(p.t);
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (!(f.at(i, j) == f.at(j, i)))
          throw DomainError("full covariance must be symmetric");
    // PD matrices form a convex set, so checking the breakpoint grid
    // covers every interpolated time as well.
    for (double t : grid) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.eval(t));
      if (es.eigenvalues().minCoeff() <= 0.0)
        throw DomainError("full covariance is not positive definite at t=" +
                          std::to_string(t));
    }
  }
}

Eigen::VectorXd Atom::mean_at(double t) const {
  Eigen::VectorXd v(dim());
  for (int i = 0; i < dim(); ++i)
    v(i) = mean_[static_cast<size_t>(i)].eval(t);
  return v;
}

Eigen::VectorXd Atom::diagonal_variances_at(double t) const {
  const auto &d = std::get<DiagonalCovariance>(cov_);
  Eigen::VectorXd v(dim());
  for (int i = 0; i < dim(); ++i)
    v(i) = d.variances[static_cast<size_t>(i)].eval(t);
  return v;
}

Atom Atom::truncate(double t) const {
  std::vector<PiecewiseLinear> mean;
  mean.reserve(mean_.size());
  for (const auto &m : mean_)
    mean.push_back(m.restrict_to(t));
  Covariance cov;
  if (const auto *d = std::get_if<DiagonalCovariance>(&cov_)) {
    DiagonalCovariance out;
    for (const auto &v : d->variances)
      out.variances.push_back(v.restrict_to(t));
    cov = std::move(out);
  } else {
    const auto &f = std::get<FullCovariance>(cov_);
    FullCovariance out;
    out.dim = f.dim;
    for (const auto &e : f.entries)
      out.entries.push_back(e.restrict_to(t));
    cov = std::move(out);
  }
  return Atom(name_, std::move(mean), std::move(cov));
}

std::vector<double> Atom::breakpoint_times() const {
  std::vector<double> ts;
  auto add = [&](const PiecewiseLinear &f) {
    for (const auto &p : f.breakpoints())
      ts.push_back(p.t);
  };
  for (const auto &m : mean_)
    add(m);
  if (const auto *d = std::get_if<DiagonalCovariance>(&cov_)) {
    for (const auto &v : d->variances)
      add(v);
  } else {
    for (const auto &e : std::get<FullCovariance>(cov_).entries)
      add(e);
  }
  std::sort(ts.begin(), ts.end());
  std::vector<double> out;
  for (double t : ts)
    if (out.empty() || t - out.back() > kTol)
      out.push_back(t);
  return out;
}

} // namespace fpl
