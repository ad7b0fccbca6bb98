// Acceptance gate: one check per shipped guarantee, one line per check.
// Exits nonzero as soon as any line says FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fpl/errors.hpp"
#include "fpl/hybrid.hpp"
#include "fpl/learn.hpp"
#include "fpl/metrics.hpp"
#include "fpl/normalize.hpp"
#include "fpl/oracle.hpp"
#include "fpl/semantics.hpp"
#include "testutil.hpp"

using namespace fpl;
using testutil::vec2;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Outcome {
  bool ok = true;
  double ms = 0.0;
  std::string note;

  void fail(const std::string &why) {
    if (ok)
      note = why;
    ok = false;
  }
};

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DomainError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture(const std::string &name) {
#ifdef FPL_TEST_FIXTURE_DIR
  return std::string(FPL_TEST_FIXTURE_DIR) + "/" + name;
#else
  return "tests/fixtures/" + name;
#endif
}

SemanticsConfig make_cfg(Aggregator agg, double du, double da = 0.01) {
  SemanticsConfig cfg;
  cfg.aggregator = agg;
  cfg.delta_until = du;
  cfg.delta_atom = da;
  return cfg;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

/* ---- criterion 1: worked point distances ---- */

Outcome point_distance_goldens() {
  Outcome res;
  auto pi1 = testutil::tracking_atom(3.0);
  AtomRef ref(pi1);
  const struct {
    double t, want;
  } cases[] = {{0.0, 2.0}, {1.5, 4.0}, {3.0, 8.0}};
  auto t0 = Clock::now();
  for (const auto &c : cases) {
    double d = point_distance(vec2(c.t, -1.0), ref, c.t,
                              MetricKind::Mahalanobis);
    if (std::abs(d - c.want) > 1e-9)
      res.fail("d(t=" + fmt(c.t) + ") = " + fmt(d) + ", want " + fmt(c.want));
  }
  res.ms = ms_since(t0);
  return res;
}

/* ---- criterion 2: worked template semantics ---- */

Outcome atom_semantics_goldens() {
  Outcome res;
  AtomRef pi1(testutil::tracking_atom(3.0));
  Trajectory z = testutil::offset_line();
  const double want_int = 36.0 * std::log(2.0) - 12.0;
  auto t0 = Clock::now();
  double dmax =
      atom_semantics(z, pi1, make_cfg(Aggregator::Max, 0.1, 1e-3)).value();
  double dint =
      atom_semantics(z, pi1, make_cfg(Aggregator::Int, 0.1, 1e-3)).value();
  res.ms = ms_since(t0);
  if (std::abs(dmax - 8.0) > 1e-6)
    res.fail("worst case " + fmt(dmax) + ", want 8");
  if (std::abs(dint - want_int) > 1e-3)
    res.fail("accumulated " + fmt(dint) + ", want " + fmt(want_int));
  return res;
}

/* ---- criterion 3: until exactness on the mean follower ---- */

Outcome until_mean_follower() {
  Outcome res;
  FormulaPtr f = Formula::until(Formula::atom(testutil::tracking_atom(4.0)),
                                Formula::atom(testutil::handoff_atom()));
  Trajectory z = testutil::mean_follower();
  auto t0 = Clock::now();
  for (Aggregator agg : {Aggregator::Max, Aggregator::Int}) {
    double v = compute_semantics(z, f, make_cfg(agg, 0.5)).value();
    if (std::abs(v) > 1e-6)
      res.fail(aggregator_name(agg) + " follower score " + fmt(v));
  }
  res.ms = ms_since(t0);
  return res;
}

/* ---- criterion 4: discretization error within the published bound ---- */

Outcome bound_conformance() {
  Outcome res;
  std::mt19937 rng(424242);
  auto t0 = Clock::now();
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::shared_ptr<const Atom>> atoms{
        testutil::random_atom(rng, 2, "a"), testutil::random_atom(rng, 2, "b"),
        testutil::random_atom(rng, 2, "c")};
    FormulaPtr f = testutil::random_formula(rng, atoms, 3, 2);
    Trajectory z = testutil::random_trajectory(rng, 2, 14.0);
    for (double delta : {0.5, 0.25}) {
      for (Aggregator agg : {Aggregator::Max, Aggregator::Int}) {
        // Both sides sample atom curves on the same window-anchored grid,
        // so the atom step cancels out of the gap; only the switch grids
        // differ, which is exactly what the bound covers.
        SemanticsConfig cfg = make_cfg(agg, delta, 0.05);
        SemanticsConfig ref = make_cfg(agg, delta / 8.0, 0.05);
        ExtendedDistance alg = compute_semantics(z, f, cfg);
        ExtendedDistance ora = oracle_semantics(z, f, ref);
        if (!alg.is_finite() || !ora.is_finite()) {
          if (!(alg == ora))
            res.fail("instance " + std::to_string(rep) +
                     ": finite/infinite disagreement");
          continue;
        }
        double gap = std::abs(alg.value() - ora.value());
        double bound = error_bound(f, z, cfg);
        if (gap > bound + 1e-9)
          res.fail("instance " + std::to_string(rep) + " (" +
                   aggregator_name(agg) + ", delta " + fmt(delta) + "): gap " +
                   fmt(gap) + " > bound " + fmt(bound));
      }
    }
  }
  res.ms = ms_since(t0);
  return res;
}

/* ---- criterion 5: normalization preserves oracle values ---- */

Outcome lnf_preserves_semantics() {
  Outcome res;
  std::mt19937 rng(9090);
  auto t0 = Clock::now();
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::shared_ptr<const Atom>> atoms{
        testutil::random_atom(rng, 2, "a"), testutil::random_atom(rng, 2, "b"),
        testutil::random_atom(rng, 2, "c")};
    FormulaPtr f = testutil::random_formula(rng, atoms, 4, 2);
    FormulaPtr n = to_lnf(f);
    Trajectory z = testutil::random_trajectory(rng, 2, 14.0);
    for (Aggregator agg : {Aggregator::Max, Aggregator::Int}) {
      SemanticsConfig cfg = make_cfg(agg, 0.25);
      ExtendedDistance a = oracle_semantics(z, f, cfg);
      ExtendedDistance b = oracle_semantics(z, n, cfg);
      if (!a.is_finite() || !b.is_finite()) {
        if (!(a == b))
          res.fail("instance " + std::to_string(rep) +
                   ": finite/infinite disagreement");
        continue;
      }
      if (std::abs(a.value() - b.value()) > 1e-9)
        res.fail("instance " + std::to_string(rep) + " (" +
                 aggregator_name(agg) + "): " + fmt(a.value()) + " vs " +
                 fmt(b.value()));
    }
  }
  res.ms = ms_since(t0);
  return res;
}

/* ---- criterion 6: simplification potential ---- */

std::shared_ptr<const Atom> block(const std::string &name, double mean0) {
  return testutil::make_affine_atom(name, 10.0, {mean0}, {0.0}, {0.5});
}

Outcome simplification_potential() {
  Outcome res;
  std::vector<AtomDag> corpus;

  {
    AtomDag chain;
    int a = chain.add_node(block("A", 0.0), UntilInterval{2.0, 4.0});
    int b = chain.add_node(block("B", 1.0), UntilInterval{3.0, 5.0});
    int c = chain.add_node(block("C", 2.0), std::nullopt);
    chain.add_edge(AtomDag::kStart, a);
    chain.add_edge(a, b);
    chain.add_edge(b, c);
    chain.add_edge(c, AtomDag::kEnd);
    corpus.push_back(std::move(chain));
  }
  {
    AtomDag par;
    int a = par.add_node(block("A", 0.0), std::nullopt);
    int b = par.add_node(block("B", 1.0), std::nullopt);
    par.add_edge(AtomDag::kStart, a);
    par.add_edge(AtomDag::kStart, b);
    par.add_edge(a, AtomDag::kEnd);
    par.add_edge(b, AtomDag::kEnd);
    corpus.push_back(std::move(par));
  }
  {
    // Needs a split before anything else applies.
    AtomDag web;
    int s = web.add_node(block("S", 0.0), UntilInterval{1.0, 2.0});
    int a = web.add_node(block("A", 1.0), UntilInterval{1.0, 2.0});
    int b = web.add_node(block("B", 2.0), UntilInterval{1.0, 2.0});
    int c = web.add_node(block("C", 3.0), std::nullopt);
    int d = web.add_node(block("D", 4.0), std::nullopt);
    web.add_edge(AtomDag::kStart, s);
    web.add_edge(s, a);
    web.add_edge(s, b);
    web.add_edge(a, c);
    web.add_edge(a, d);
    web.add_edge(b, d);
    web.add_edge(c, AtomDag::kEnd);
    web.add_edge(d, AtomDag::kEnd);
    corpus.push_back(std::move(web));
  }
  {
    std::mt19937 rng(74);
    std::vector<Trajectory> data;
    for (int i = 0; i < 20; ++i)
      data.push_back(testutil::out_and_back(rng, i < 10 ? 1 : -1, 1.0, 0.05));
    LearnConfig cfg;
    AtomDag dag = learn_atom_dag(data, cfg);
    merge_similar_atoms(dag, cfg);
    corpus.push_back(std::move(dag));
  }

  auto t0 = Clock::now();
  int steps = 0, splits = 0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    std::vector<SimplifyStep> trace;
    simplify_dag(corpus[i], &trace);
    for (const SimplifyStep &st : trace) {
      ++steps;
      if (st.phi_after >= st.phi_before)
        res.fail("graph " + std::to_string(i) + ": " + st.op +
                 " did not decrease the potential");
      if (st.op == "split") {
        ++splits;
        if (st.phi_after != st.phi_before - 1)
          res.fail("graph " + std::to_string(i) +
                   ": split changed the potential by " +
                   std::to_string(st.phi_after - st.phi_before));
      }
    }
    // Potential 1 means one internal node is left beside start and end,
    // i.e. the graph is down to three nodes.
    if (!trace.empty() && trace.back().phi_after != 1)
      res.fail("graph " + std::to_string(i) + " stopped at potential " +
               std::to_string(trace.back().phi_after));
  }
  res.ms = ms_since(t0);
  if (steps == 0)
    res.fail("corpus produced no simplification steps");
  if (splits == 0)
    res.fail("corpus never exercised a split");
  return res;
}

/* ---- criterion 7: learned structure ---- */

double lead_slope(const FormulaPtr &leaf) {
  const Atom &a = *leaf->leaf_ref().atom();
  double h = a.horizon();
  return h <= 0.0 ? 0.0 : (a.mean_at(h)(0) - a.mean_at(0.0)(0)) / h;
}

Outcome learned_structure() {
  Outcome res;
  std::mt19937 rng_a(72), rng_b(73);
  std::vector<Trajectory> chain_data, branch_data;
  for (int i = 0; i < 20; ++i)
    chain_data.push_back(testutil::phase_trajectory(
        rng_a, {{0.0, 50.0, 3.0}, {1.0, 50.0, 3.0}, {0.0, 100.0, 0.0}}, 1.0,
        0.05));
  for (int i = 0; i < 20; ++i)
    branch_data.push_back(testutil::phase_trajectory(
        rng_b, {{0.0, 50.0, 3.0}, {i % 2 == 0 ? 1.0 : -1.0, 150.0, 0.0}},
        1.0, 0.05));

  auto t0 = Clock::now();
  LearnConfig cfg;

  LearnResult chain = learn_fpl(chain_data, cfg);
  FormulaPtr f = chain.formula;
  bool chain_shape = f->kind() == Formula::Kind::Until && f->left()->is_leaf() &&
                     f->right()->kind() == Formula::Kind::Until &&
                     f->right()->left()->is_leaf() &&
                     f->right()->right()->is_leaf();
  if (!chain_shape) {
    res.fail("rest/move/rest did not learn a two-level until chain");
  } else {
    double s0 = lead_slope(f->left());
    double s1 = lead_slope(f->right()->left());
    double s2 = lead_slope(f->right()->right());
    if (std::abs(s0) > 0.1 || std::abs(s1 - 1.0) > 0.1 || std::abs(s2) > 0.1)
      res.fail("chain slopes " + fmt(s0) + ", " + fmt(s1) + ", " + fmt(s2));
  }

  LearnResult branch = learn_fpl(branch_data, cfg);
  FormulaPtr g = branch.formula;
  bool branch_shape = g->kind() == Formula::Kind::Until &&
                      g->left()->is_leaf() &&
                      g->right()->kind() == Formula::Kind::Or &&
                      g->right()->left()->is_leaf() &&
                      g->right()->right()->is_leaf();
  if (!branch_shape) {
    res.fail("rest-then-branch did not learn rest until a disjunction");
  } else {
    double b1 = lead_slope(g->right()->left());
    double b2 = lead_slope(g->right()->right());
    if (b1 > b2)
      std::swap(b1, b2);
    if (std::abs(b1 + 1.0) > 0.1 || std::abs(b2 - 1.0) > 0.1)
      res.fail("branch slopes " + fmt(b1) + ", " + fmt(b2));
  }
  res.ms = ms_since(t0);
  return res;
}

/* ---- criterion 8: merging of matching phases ---- */

Outcome merge_behavior() {
  Outcome res;
  std::mt19937 rng(74);
  std::vector<Trajectory> data;
  for (int i = 0; i < 20; ++i)
    data.push_back(testutil::out_and_back(rng, i < 10 ? 1 : -1, 1.0, 0.05));
  auto t0 = Clock::now();
  LearnResult r = learn_fpl(data, LearnConfig{});
  res.ms = ms_since(t0);
  if (r.nodes_before_merge - r.nodes_after_merge < 1)
    res.fail("merge phase kept all " + std::to_string(r.nodes_before_merge) +
             " templates");
  return res;
}

/* ---- criterion 9: hybrid machine checking ---- */

Outcome hybrid_checking() {
  Outcome res;
  std::string three = read_file(fixture("three_run.json"));
  std::string follower = read_file(fixture("follower_ha.json"));
  FormulaPtr f = Formula::until(Formula::atom(testutil::tracking_atom(4.0)),
                                Formula::atom(testutil::handoff_atom()));
  auto t0 = Clock::now();
  RestrictedHybridAutomaton ha3 = parse_automaton(three);
  size_t runs = enumerate_runs(ha3, ha3.horizon(), 100).size();
  if (runs != 3)
    res.fail("three-run machine enumerated " + std::to_string(runs) +
             " runs");
  RestrictedHybridAutomaton haf = parse_automaton(follower);
  ModelCheckResult mc = model_check(haf, f, ExtendedDistance(0.1),
                                    make_cfg(Aggregator::Max, 0.5));
  if (!mc.all_within)
    res.fail("follower machine missed the 0.1 threshold (distance " +
             fmt(mc.distances[static_cast<size_t>(mc.worst_run)].value()) +
             ")");
  res.ms = ms_since(t0);
  return res;
}

/* ---- criterion 10: scale invariance of the normalized distance ---- */

PiecewiseLinear scale_plf(const PiecewiseLinear &f, double s) {
  std::vector<PiecewiseLinear::Breakpoint> pts;
  for (const auto &bp : f.breakpoints())
    pts.push_back({bp.t, bp.v * s});
  return PiecewiseLinear(std::move(pts));
}

std::shared_ptr<const Atom> scale_atom(const Atom &a, int k, double s) {
  std::vector<PiecewiseLinear> mean = a.mean();
  mean[static_cast<size_t>(k)] = scale_plf(mean[static_cast<size_t>(k)], s);
  DiagonalCovariance cov = std::get<DiagonalCovariance>(a.covariance());
  cov.variances[static_cast<size_t>(k)] =
      scale_plf(cov.variances[static_cast<size_t>(k)], s * s);
  return std::make_shared<Atom>(a.name(), std::move(mean), std::move(cov));
}

Trajectory scale_trajectory(const Trajectory &z, int k, double s) {
  std::vector<double> ts = z.times();
  std::vector<Eigen::VectorXd> ps;
  for (size_t i = 0; i < z.sample_count(); ++i) {
    Eigen::VectorXd p = z.point(i);
    p(k) *= s;
    ps.push_back(std::move(p));
  }
  return Trajectory(std::move(ts), std::move(ps));
}

FormulaPtr substitute(const FormulaPtr &f,
                      const std::map<const Atom *,
                                     std::shared_ptr<const Atom>> &subs) {
  switch (f->kind()) {
  case Formula::Kind::Leaf:
    if (f->leaf_ref().is_top())
      return f;
    return Formula::atom(subs.at(f->leaf_ref().atom().get()));
  case Formula::Kind::Or:
    return Formula::disjunction(substitute(f->left(), subs),
                                substitute(f->right(), subs));
  case Formula::Kind::Concat:
    return Formula::concat(substitute(f->left(), subs),
                           substitute(f->right(), subs));
  case Formula::Kind::Until:
    return Formula::until(substitute(f->left(), subs),
                          substitute(f->right(), subs), f->until_interval());
  }
  throw Error("unreachable");
}

Outcome scale_robustness() {
  Outcome res;
  std::mt19937 rng(555);
  std::uniform_int_distribution<int> pick_dim(0, 1);
  std::uniform_real_distribution<double> log_scale(-3.0, 3.0);
  auto t0 = Clock::now();
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::shared_ptr<const Atom>> atoms{
        testutil::random_atom(rng, 2, "a"), testutil::random_atom(rng, 2, "b")};
    FormulaPtr f = testutil::random_formula(rng, atoms, 2, 1);
    Trajectory z = testutil::random_trajectory(rng, 2, 8.0);
    int k = pick_dim(rng);
    double s = std::pow(10.0, log_scale(rng));

    std::map<const Atom *, std::shared_ptr<const Atom>> subs;
    for (const auto &a : atoms)
      subs.emplace(a.get(), scale_atom(*a, k, s));
    FormulaPtr fs = substitute(f, subs);
    Trajectory zs = scale_trajectory(z, k, s);

    for (Aggregator agg : {Aggregator::Max, Aggregator::Int}) {
      SemanticsConfig cfg = make_cfg(agg, 0.25);
      ExtendedDistance before = compute_semantics(z, f, cfg);
      ExtendedDistance after = compute_semantics(zs, fs, cfg);
      if (before.is_infinite() && after.is_infinite())
        continue;
      if (before.is_infinite() != after.is_infinite()) {
        res.fail("instance " + std::to_string(rep) +
                 ": finite/infinite disagreement");
        continue;
      }
      if (std::abs(before.value() - after.value()) > 1e-6)
        res.fail("instance " + std::to_string(rep) + " (" +
                 aggregator_name(agg) + ", scale " + fmt(s) + "): " +
                 fmt(before.value()) + " became " + fmt(after.value()));
    }
  }
  res.ms = ms_since(t0);
  return res;
}

} // namespace

int main() {
  struct Entry {
    int id;
    double limit_ms;
    const char *label;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries{
      {1, 1.0, "worked point distances equal 2, 4, 8", point_distance_goldens},
      {2, 50.0, "worked template distances hit both frozen references",
       atom_semantics_goldens},
      {3, 100.0, "mean follower scores zero through the until",
       until_mean_follower},
      {4, 60000.0, "discretization gap within the published bound, 100 seeds",
       bound_conformance},
      {5, 60000.0, "normalization preserves oracle values, 50 seeds",
       lnf_preserves_semantics},
      {6, 1000.0, "simplification potential strictly decreases to one",
       simplification_potential},
      {7, 30000.0, "learned chain and branch recover the phase slopes",
       learned_structure},
      {8, 30000.0, "matching return phases merge into one template",
       merge_behavior},
      {9, 5000.0, "hybrid machines enumerate and verify as published",
       hybrid_checking},
      {10, 60000.0, "semantics invariant under per-dimension rescaling",
       scale_robustness},
  };

  int passed = 0;
  for (const Entry &e : entries) {
    Outcome out;
    try {
      out = e.run();
    } catch (const std::exception &ex) {
      out.fail(std::string("threw: ") + ex.what());
    }
    if (out.ok && out.ms > e.limit_ms)
      out.fail("took " + fmt(out.ms) + " ms, limit " + fmt(e.limit_ms));
    if (out.ok)
      ++passed;
    std::printf("criterion %2d %s %9.1f ms  %s%s%s\n", e.id,
                out.ok ? "pass" : "FAIL", out.ms, e.label,
                out.note.empty() ? "" : " -- ", out.note.c_str());
  }
  std::printf("%d/%d criteria passed\n", passed,
              static_cast<int>(entries.size()));
  return passed == static_cast<int>(entries.size()) ? 0 : 1;
}
