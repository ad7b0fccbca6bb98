#include "fpl/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fpl/errors.hpp"
#include "fpl/plf.hpp"

namespace fpl {

namespace {

constexpr double kConditionLimit = 1e12;

/* Eigendecomposition of the full covariance at t, with the singularity
 * guard applied. */
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>
full_cov_eigen(const FullCovariance &f, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.eval(t));
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0) || hi / lo > kConditionLimit)
    throw SingularCovariance(
        "covariance is numerically singular at t=" + std::to_string(t) +
        " (condition " + std::to_string(lo > 0 ? hi / lo : -1.0) + ")");
  return es;
}

double quantile_folded(double delta, double half_width, bool triangular) {
  // |2F(x)-1| for the symmetric distribution centred at the mean:
  // uniform:    |delta| / h      (clamped to 1)
  // triangular: 1 - (1 - |delta|/h)^2  inside the support, 1 outside
  double r = std::abs(delta) / half_width;
  if (r >= 1.0)
    return 1.0;
  if (!triangular)
    return r;
  double u = 1.0 - r;
  return 1.0 - u * u;
}

const DiagonalCovariance &diagonal_or_throw(const Atom &a,
                                            MetricKind kind) {
  const auto *d = std::get_if<DiagonalCovariance>(&a.covariance());
  if (!d)
    throw DomainError(metric_name(kind) +
                      " requires a diagonal covariance (atom '" + a.name() +
                      "')");
  return *d;
}

} // namespace

MetricKind metric_from_name(const std::string &name) {
  if (name == "mahalanobis")
    return MetricKind::Mahalanobis;
  if (name == "mahalanobis-inf")
    return MetricKind::MahalanobisInf;
  if (name == "quantile-uniform")
    return MetricKind::QuantileUniform;
  if (name == "quantile-triangular")
    return MetricKind::QuantileTriangular;
  if (name == "euclidean")
    return MetricKind::Euclidean;
  throw DomainError("unknown metric '" + name + "'");
}

std::string metric_name(MetricKind kind) {
  switch (kind) {
  case MetricKind::Mahalanobis:
    return "mahalanobis";
  case MetricKind::MahalanobisInf:
    return "mahalanobis-inf";
  case MetricKind::QuantileUniform:
    return "quantile-uniform";
  case MetricKind::QuantileTriangular:
    return "quantile-triangular";
  case MetricKind::Euclidean:
    return "euclidean";
  }
  throw Error("unreachable metric kind");
}

double point_distance(const Eigen::VectorXd &x, const AtomRef &ref, double t,
                      MetricKind kind) {
  if (x.size() != ref.dim())
    throw DomainError("point dimension " + std::to_string(x.size()) +
                      " does not match template dimension " +
                      std::to_string(ref.dim()));
  if (ref.is_top()) {
    if (t < -PiecewiseLinear::kTimeTol ||
        t > ref.top().horizon + PiecewiseLinear::kTimeTol)
      throw DomainError("evaluation time outside the top horizon");
    return 0.0;
  }

  const Atom &a = *ref.atom();
  Eigen::VectorXd delta = x - a.mean_at(t);

  switch (kind) {
  case MetricKind::Euclidean:
    return delta.norm();

  case MetricKind::Mahalanobis: {
    if (const auto *d = std::get_if<DiagonalCovariance>(&a.covariance())) {
      double acc = 0.0;
      for (int i = 0; i < a.dim(); ++i) {
        double v = d->variances[static_cast<size_t>(i)].eval(t);
        if (!std::isinf(v))
          acc += delta(i) * delta(i) / v;
      }
      return std::sqrt(acc);
    }
    auto es = full_cov_eigen(std::get<FullCovariance>(a.covariance()), t);
    Eigen::VectorXd y = es.eigenvectors().transpose() * delta;
    double acc = 0.0;
    for (int i = 0; i < a.dim(); ++i)
      acc += y(i) * y(i) / es.eigenvalues()(i);
    return std::sqrt(acc);
  }

  case MetricKind::MahalanobisInf: {
    double m = 0.0;
    if (const auto *d = std::get_if<DiagonalCovariance>(&a.covariance())) {
      for (int i = 0; i < a.dim(); ++i) {
        double v = d->variances[static_cast<size_t>(i)].eval(t);
        if (!std::isinf(v))
          m = std::max(m, std::abs(delta(i)) / std::sqrt(v));
      }
    } else {
      const auto &f = std::get<FullCovariance>(a.covariance());
      for (int i = 0; i < a.dim(); ++i)
        m = std::max(m, std::abs(delta(i)) / std::sqrt(f.at(i, i).eval(t)));
    }
    return m;
  }

  case MetricKind::QuantileUniform:
  case MetricKind::QuantileTriangular: {
    bool tri = kind == MetricKind::QuantileTriangular;
    const auto &d = diagonal_or_throw(a, kind);
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
      double v = d.variances[static_cast<size_t>(i)].eval(t);
      if (std::isinf(v))
        continue;
      double h = std::sqrt(tri ? 6.0 * v : 3.0 * v);
      m = std::max(m, quantile_folded(delta(i), h, tri));
    }
    return m;
  }
  }
  throw Error("unreachable metric kind");
}

double spatial_lipschitz(const AtomRef &ref, double t, MetricKind kind) {
  if (ref.is_top())
    return 0.0;
  const Atom &a = *ref.atom();

  switch (kind) {
  case MetricKind::Euclidean:
    return 1.0;

  case MetricKind::Mahalanobis: {
    if (const auto *d = std::get_if<DiagonalCovariance>(&a.covariance())) {
      double worst = 0.0;
      for (const auto &v : d->variances)
        if (!v.is_infinite())
          worst = std::max(worst, 1.0 / std::sqrt(v.eval(t)));
      return worst;
    }
    auto es = full_cov_eigen(std::get<FullCovariance>(a.covariance()), t);
    return 1.0 / std::sqrt(es.eigenvalues().minCoeff());
  }

  case MetricKind::MahalanobisInf: {
    double worst = 0.0;
    if (const auto *d = std::get_if<DiagonalCovariance>(&a.covariance())) {
      for (const auto &v : d->variances)
        if (!v.is_infinite())
          worst = std::max(worst, 1.0 / std::sqrt(v.eval(t)));
    } else {
      const auto &f = std::get<FullCovariance>(a.covariance());
      for (int i = 0; i < a.dim(); ++i)
        worst = std::max(worst, 1.0 / std::sqrt(f.at(i, i).eval(t)));
    }
    return worst;
  }

  case MetricKind::QuantileUniform:
  case MetricKind::QuantileTriangular: {
    bool tri = kind == MetricKind::QuantileTriangular;
    const auto &d = diagonal_or_throw(a, kind);
    double worst = 0.0;
    for (const auto &v : d.variances) {
      if (v.is_infinite())
        continue;
      double h = std::sqrt((tri ? 6.0 : 3.0) * v.eval(t));
      // |2F-1| has slope 2*density; the peak density is 1/(2h) for the
      // uniform and 1/h for the triangular distribution
      worst = std::max(worst, (tri ? 2.0 : 1.0) / h);
    }
    return worst;
  }
  }
  throw Error("unreachable metric kind");
}

double DistanceCurve::max_value() const {
  double m = 0.0;
  for (double v : values)
    m = std::max(m, v);
  return m;
}

double DistanceCurve::trapezoid() const {
  double acc = 0.0;
  for (size_t i = 1; i < times.size(); ++i)
    acc += 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
  return acc;
}

DistanceCurve distance_curve(const Trajectory &z, const AtomRef &ref,
                             double step, MetricKind kind) {
  return distance_curve(z, ref, step, kind, ref.horizon());
}

DistanceCurve distance_curve(const Trajectory &z, const AtomRef &ref,
                             double step, MetricKind kind,
                             double eval_horizon) {
  if (!(step > 0))
    throw DomainError("distance curve step must be positive");
  if (eval_horizon > ref.horizon() + PiecewiseLinear::kTimeTol ||
      eval_horizon < 0)
    throw DomainError("evaluation horizon outside the template domain");
  double tau = std::min(eval_horizon, ref.horizon());
  if (z.horizon() < tau - PiecewiseLinear::kTimeTol)
    throw DomainError("trajectory horizon is shorter than the template "
                      "horizon");

  std::vector<double> grid;
  for (long m = 0;; ++m) {
    double t = static_cast<double>(m) * step;
    if (t >= tau - PiecewiseLinear::kTimeTol)
      break;
    grid.push_back(t);
  }
  grid.push_back(tau);
  for (double t : z.times())
    if (t < tau + PiecewiseLinear::kTimeTol)
      grid.push_back(std::min(t, tau));
  if (!ref.is_top())
    for (double t : ref.atom()->breakpoint_times())
      if (t < tau - PiecewiseLinear::kTimeTol)
        grid.push_back(t);

  std::sort(grid.begin(), grid.end());
  DistanceCurve curve;
  for (double t : grid) {
    if (!curve.times.empty() &&
        t - curve.times.back() <= PiecewiseLinear::kTimeTol)
      continue;
    curve.times.push_back(t);
    curve.values.push_back(point_distance(z.eval(t), ref, t, kind));
  }
  // the final sample always sits exactly at the template horizon
  if (std::abs(curve.times.back() - tau) <= PiecewiseLinear::kTimeTol)
    curve.times.back() = tau;
  return curve;
}

} // namespace fpl
