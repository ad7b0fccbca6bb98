#include "doctest.h"

#include <cmath>
#include <limits>
#include <memory>

#include "fpl/atom.hpp"
#include "fpl/errors.hpp"
#include "fpl/formula.hpp"

using namespace fpl;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

/* 2-d atom with mean (t, t/3) and variances (1/16, (1/2 - t/12)^2) over
 * [0, horizon]; the y-variance is stored on a dense breakpoint grid since
 * its square root, not the variance itself, is linear in t. */
std::shared_ptr<const Atom> example_atom(double horizon, double var_step) {
  std::vector<PiecewiseLinear::Breakpoint> vy;
  for (double t = 0.0;; t += var_step) {
    if (t > horizon)
      t = horizon;
    double s = 0.5 - t / 12.0;
    vy.push_back({t, s * s});
    if (t >= horizon)
      break;
  }
  std::vector<PiecewiseLinear> mean{
      PiecewiseLinear({{0.0, 0.0}, {horizon, horizon}}),
      PiecewiseLinear({{0.0, 0.0}, {horizon, horizon / 3.0}})};
  DiagonalCovariance cov;
  cov.variances.push_back(
      PiecewiseLinear::constant(0.0, horizon, 1.0 / 16.0));
  cov.variances.push_back(PiecewiseLinear(std::move(vy)));
  return std::make_shared<Atom>("pi1", std::move(mean), std::move(cov));
}

} // namespace

TEST_CASE("atom exposes mean and variances at a time") {
  auto a = example_atom(3.0, 0.01);
  CHECK(a->dim() == 2);
  CHECK(a->horizon() == 3.0);
  CHECK(a->mean_at(1.5)(0) == doctest::Approx(1.5));
  CHECK(a->mean_at(1.5)(1) == doctest::Approx(0.5));
  CHECK(a->diagonal_variances_at(0.0)(1) == doctest::Approx(0.25));
  CHECK(a->diagonal_variances_at(3.0)(1) == doctest::Approx(0.0625));
}

TEST_CASE("atom validation") {
  std::vector<PiecewiseLinear> mean{PiecewiseLinear({{0.0, 0.0}, {2.0, 1.0}})};
  SUBCASE("variance domain must match the mean domain") {
    DiagonalCovariance cov;
    cov.variances.push_back(PiecewiseLinear::constant(0.0, 1.0, 1.0));
    CHECK_THROWS_AS(Atom("a", mean, std::move(cov)), DomainError);
  }
  SUBCASE("variances must be positive") {
    DiagonalCovariance cov;
    cov.variances.push_back(
        PiecewiseLinear({{0.0, 1.0}, {2.0, 0.0}}));
    CHECK_THROWS_AS(Atom("a", mean, std::move(cov)), DomainError);
  }
  SUBCASE("all-infinite variance is an unconstrained dimension") {
    DiagonalCovariance cov;
    cov.variances.push_back(PiecewiseLinear::constant(0.0, 2.0, kInf));
    CHECK_NOTHROW(Atom("a", mean, std::move(cov)));
  }
  SUBCASE("dimension mismatch is rejected") {
    DiagonalCovariance cov;
    cov.variances.push_back(PiecewiseLinear::constant(0.0, 2.0, 1.0));
    cov.variances.push_back(PiecewiseLinear::constant(0.0, 2.0, 1.0));
    CHECK_THROWS_AS(Atom("a", mean, std::move(cov)), DomainError);
  }
}

TEST_CASE("full covariance must be symmetric and positive definite") {
  std::vector<PiecewiseLinear> mean{
      PiecewiseLinear::constant(0.0, 1.0, 0.0),
      PiecewiseLinear::constant(0.0, 1.0, 0.0)};
  FullCovariance good;
  good.dim = 2;
  good.entries = {PiecewiseLinear::constant(0.0, 1.0, 2.0),
                  PiecewiseLinear::constant(0.0, 1.0, 0.5),
                  PiecewiseLinear::constant(0.0, 1.0, 0.5),
                  PiecewiseLinear::constant(0.0, 1.0, 1.0)};
  CHECK_NOTHROW(Atom("f", mean, good));

  FullCovariance asym = good;
  asym.entries[1] = PiecewiseLinear::constant(0.0, 1.0, 0.4);
  CHECK_THROWS_AS(Atom("f", mean, asym), DomainError);

  FullCovariance indef = good;
  indef.entries[1] = PiecewiseLinear::constant(0.0, 1.0, 3.0);
  indef.entries[2] = PiecewiseLinear::constant(0.0, 1.0, 3.0);
  CHECK_THROWS_AS(Atom("f", mean, indef), DomainError);

  FullCovariance inf_entry = good;
  inf_entry.entries[0] = PiecewiseLinear::constant(0.0, 1.0, kInf);
  CHECK_THROWS_AS(Atom("f", mean, inf_entry), DomainError);
}

TEST_CASE("atom truncation restricts every component") {
  auto a = example_atom(3.0, 0.01);
  Atom cut = a->truncate(1.5);
  CHECK(cut.horizon() == 1.5);
  CHECK(cut.mean_at(1.5)(1) == doctest::Approx(0.5));
  double s = 0.5 - 1.5 / 12.0;
  CHECK(cut.diagonal_variances_at(1.5)(1) == doctest::Approx(s * s));

  Atom point = a->truncate(0.0);
  CHECK(point.horizon() == 0.0);
  CHECK(point.mean_at(0.0)(0) == 0.0);

  CHECK_THROWS_AS(a->truncate(3.5), DomainError);
}

TEST_CASE("formula structure and derived counts") {
  auto a = example_atom(3.0, 0.5);
  auto b = example_atom(2.0, 0.5);
  auto fa = Formula::atom(a);
  auto fb = Formula::atom(b);
  auto top = Formula::top(1.0, 2);
  auto f = Formula::disjunction(Formula::until(fa, fb),
                                Formula::concat(top, fb));
  CHECK(f->dim() == 2);
  CHECK(h_min(f) == 1.0);
  CHECK(count_until(f) == 1);
  CHECK(count_concat_until(f) == 2);
  CHECK(node_count(f) == 7);
  CHECK(collect_atoms(f).size() == 4);
  CHECK(is_lnf(f));

  auto not_lnf = Formula::concat(Formula::disjunction(fa, fb), fb);
  CHECK(!is_lnf(not_lnf));

  // mismatched dimensions are rejected
  std::vector<PiecewiseLinear> mean1{PiecewiseLinear::constant(0, 1, 0.0)};
  DiagonalCovariance cov1;
  cov1.variances.push_back(PiecewiseLinear::constant(0, 1, 1.0));
  auto one_d = std::make_shared<Atom>("x", mean1, cov1);
  CHECK_THROWS_AS(Formula::disjunction(fa, Formula::atom(one_d)),
                  DomainError);

  // until interval sanity
  CHECK_THROWS_AS(
      Formula::until(fa, fb, UntilInterval{2.0, 1.0}),
      DomainError);
  auto u = Formula::until(fa, fb, UntilInterval{1.0, 2.5});
  CHECK(u->until_interval()->hi == 2.5);
}
