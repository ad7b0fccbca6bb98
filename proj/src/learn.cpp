#include "fpl/learn.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <set>

#include "fpl/errors.hpp"

namespace fpl {

namespace {

constexpr double kTol = PiecewiseLinear::kTimeTol;

void insert_sorted(std::vector<int> &v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x)
    v.insert(it, x);
}

void erase_value(std::vector<int> &v, int x) {
  v.erase(std::remove(v.begin(), v.end(), x), v.end());
}

/* Value of a piecewise-linear function at t, continued past its domain
 * along the final segment. Lines fitted by the learner stay lines. */
double extend_eval(const PiecewiseLinear &f, double t) {
  if (t <= f.t_max() + kTol)
    return f.eval(std::min(t, f.t_max()));
  const auto &bp = f.breakpoints();
  if (bp.size() < 2)
    return bp.back().v;
  const auto &a = bp[bp.size() - 2];
  const auto &b = bp.back();
  double slope = (b.v - a.v) / (b.t - a.t);
  return b.v + slope * (t - b.t);
}

/* Value at t, held constant past the domain. Used for variances, which
 * must stay positive. */
double extend_hold(const PiecewiseLinear &f, double t) {
  if (t <= f.t_max() + kTol)
    return f.eval(std::min(t, f.t_max()));
  return f.breakpoints().back().v;
}

const DiagonalCovariance &diagonal_of(const Atom &a, const char *what) {
  if (!a.has_diagonal_covariance())
    throw DomainError(std::string(what) +
                      " requires templates with diagonal covariance");
  return std::get<DiagonalCovariance>(a.covariance());
}

} // namespace

double resolve_dev_threshold(const LearnConfig &cfg, int dim) {
  if (cfg.dev_threshold > 0.0)
    return cfg.dev_threshold;
  return dim == 1 ? 4.0 : 3.0;
}

AtomDag::AtomDag() {
  nodes_[kStart] = DagNode{};
  nodes_[kEnd] = DagNode{};
}

int AtomDag::add_node(std::shared_ptr<const Atom> atom,
                      std::optional<UntilInterval> interval) {
  int id = next_id_++;
  DagNode n;
  n.atom = std::move(atom);
  n.interval = interval;
  nodes_[id] = std::move(n);
  return id;
}

void AtomDag::add_edge(int from, int to) {
  if (!has_node(from) || !has_node(to))
    throw Error("edge endpoint is not a node");
  if (from == to)
    throw Error("self edge");
  insert_sorted(nodes_[from].children, to);
  insert_sorted(nodes_[to].parents, from);
}

void AtomDag::remove_node(int id) {
  if (id == kStart || id == kEnd)
    throw Error("start and end are permanent");
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    throw Error("removing unknown node");
  for (int p : it->second.parents)
    erase_value(nodes_[p].children, id);
  for (int c : it->second.children)
    erase_value(nodes_[c].parents, id);
  nodes_.erase(it);
}

bool AtomDag::has_node(int id) const { return nodes_.count(id) > 0; }

const DagNode &AtomDag::node(int id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    throw Error("unknown node id");
  return it->second;
}

DagNode &AtomDag::node(int id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    throw Error("unknown node id");
  return it->second;
}

std::vector<int> AtomDag::ids() const {
  std::vector<int> out;
  out.reserve(nodes_.size());
  for (const auto &kv : nodes_)
    out.push_back(kv.first);
  return out;
}

std::vector<int> AtomDag::internal_ids() const {
  std::vector<int> out;
  for (const auto &kv : nodes_)
    if (kv.first != kStart && kv.first != kEnd)
      out.push_back(kv.first);
  return out;
}

bool AtomDag::has_path(int from, int to) const {
  if (from == to)
    return true;
  std::set<int> seen;
  std::deque<int> work{from};
  while (!work.empty()) {
    int u = work.front();
    work.pop_front();
    if (!seen.insert(u).second)
      continue;
    auto it = nodes_.find(u);
    if (it == nodes_.end())
      continue;
    for (int c : it->second.children) {
      if (c == to)
        return true;
      work.push_back(c);
    }
  }
  return false;
}

long long AtomDag::psi() const {
  std::map<int, long long> memo;
  // Safe to recurse: validate() guarantees acyclicity before anyone sums
  // the potential, and the recursion below only follows child edges.
  auto rec = [&](auto &&self, int u) -> long long {
    if (u == kStart || u == kEnd)
      return 0;
    auto it = memo.find(u);
    if (it != memo.end())
      return it->second;
    long long s = -1;
    for (int c : node(u).children)
      s += self(self, c) + 1;
    memo[u] = s;
    return s;
  };
  long long total = 0;
  for (int u : internal_ids())
    total += rec(rec, u);
  return total;
}

long long AtomDag::phi() const {
  return static_cast<long long>(internal_ids().size()) + 2 * psi();
}

void AtomDag::validate() const {
  if (!has_node(kStart) || !has_node(kEnd))
    throw Error("graph lost its start or end");
  if (!node(kStart).parents.empty())
    throw Error("start node has parents");
  if (!node(kEnd).children.empty())
    throw Error("end node has children");
  for (const auto &kv : nodes_) {
    for (int c : kv.second.children) {
      if (!has_node(c))
        throw Error("edge to unknown node");
      const auto &ps = node(c).parents;
      if (!std::binary_search(ps.begin(), ps.end(), kv.first))
        throw Error("edge lists disagree");
    }
    for (int p : kv.second.parents) {
      if (!has_node(p))
        throw Error("edge from unknown node");
      const auto &cs = node(p).children;
      if (!std::binary_search(cs.begin(), cs.end(), kv.first))
        throw Error("edge lists disagree");
    }
  }
  // Kahn's algorithm; leftovers mean a cycle.
  std::map<int, int> indeg;
  std::deque<int> ready;
  for (const auto &kv : nodes_) {
    indeg[kv.first] = static_cast<int>(kv.second.parents.size());
    if (kv.second.parents.empty())
      ready.push_back(kv.first);
  }
  size_t seen = 0;
  while (!ready.empty()) {
    int u = ready.front();
    ready.pop_front();
    ++seen;
    for (int c : node(u).children)
      if (--indeg[c] == 0)
        ready.push_back(c);
  }
  if (seen != nodes_.size())
    throw Error("graph has a cycle");
  for (int u : internal_ids()) {
    const DagNode &n = node(u);
    if (!has_path(kStart, u) || !has_path(u, kEnd))
      throw Error("node off every start-to-end path");
    if (!n.atom && !n.fragment)
      throw Error("internal node carries no template or fragment");
    if (n.interval && (n.interval->lo < 0.0 || n.interval->lo > n.interval->hi + kTol))
      throw Error("malformed hand-off window");
  }
}

namespace {

Eigen::VectorXd prefix_feature(const Trajectory &z, int init_len) {
  int d = z.dim();
  Eigen::VectorXd f(static_cast<Eigen::Index>(init_len) * d);
  for (int i = 0; i < init_len; ++i)
    f.segment(static_cast<Eigen::Index>(i) * d, d) = z.point(i);
  return f;
}

double pooled_std(const std::vector<Eigen::VectorXd> &features,
                  const std::vector<int> &idx) {
  if (idx.size() < 2)
    return 0.0;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(features[idx[0]].size());
  for (int i : idx)
    mean += features[i];
  mean /= static_cast<double>(idx.size());
  double var = 0.0;
  for (int i : idx)
    var += (features[i] - mean).squaredNorm();
  var /= static_cast<double>(idx.size()) * mean.size();
  return std::sqrt(var);
}

/* Two-centroid Lloyd pass seeded with the farthest pair. Returns false
 * when the split is not worth keeping. */
bool bisect(const std::vector<Eigen::VectorXd> &features,
            const std::vector<int> &idx, double spread, std::vector<int> &lo,
            std::vector<int> &hi) {
  size_t besti = 0, bestj = 1;
  double bestd = -1.0;
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = i + 1; j < idx.size(); ++j) {
      double d = (features[idx[i]] - features[idx[j]]).norm();
      if (d > bestd) {
        bestd = d;
        besti = i;
        bestj = j;
      }
    }
  Eigen::VectorXd c1 = features[idx[besti]];
  Eigen::VectorXd c2 = features[idx[bestj]];
  std::vector<char> side(idx.size(), 0);
  for (int round = 0; round < 50; ++round) {
    bool changed = false;
    for (size_t i = 0; i < idx.size(); ++i) {
      const Eigen::VectorXd &f = features[idx[i]];
      char s = (f - c1).norm() <= (f - c2).norm() ? 0 : 1;
      if (s != side[i]) {
        side[i] = s;
        changed = true;
      }
    }
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(c1.size());
    Eigen::VectorXd s2 = Eigen::VectorXd::Zero(c2.size());
    int n1 = 0, n2 = 0;
    for (size_t i = 0; i < idx.size(); ++i) {
      if (side[i] == 0) {
        s1 += features[idx[i]];
        ++n1;
      } else {
        s2 += features[idx[i]];
        ++n2;
      }
    }
    if (n1 == 0 || n2 == 0)
      return false;
    c1 = s1 / n1;
    c2 = s2 / n2;
    if (!changed)
      break;
  }
  // Keep the split only when the halves explain most of the spread. Mere
  // jitter keeps the within-half std near the whole group's (a uniform
  // spread splits at exactly half of it), while genuinely distinct
  // behaviors drive it toward the noise floor.
  double within = 0.0;
  for (size_t i = 0; i < idx.size(); ++i)
    within += (features[idx[i]] - (side[i] == 0 ? c1 : c2)).squaredNorm();
  within = std::sqrt(within / (static_cast<double>(idx.size()) * c1.size()));
  if (within > 0.4 * spread)
    return false;
  std::vector<int> a, b;
  for (size_t i = 0; i < idx.size(); ++i)
    (side[i] == 0 ? a : b).push_back(idx[i]);
  if (a.empty() || b.empty())
    return false;
  // The half holding the earliest trajectory comes out first.
  if (side[0] == 0) {
    lo = std::move(a);
    hi = std::move(b);
  } else {
    lo = std::move(b);
    hi = std::move(a);
  }
  return true;
}

void cluster_rec(const std::vector<Eigen::VectorXd> &features,
                 const std::vector<int> &idx, const LearnConfig &cfg,
                 std::vector<std::vector<int>> &out) {
  double spread = pooled_std(features, idx);
  if (idx.size() < 2 || spread < cfg.cluster_std_threshold) {
    out.push_back(idx);
    return;
  }
  std::vector<int> lo, hi;
  if (!bisect(features, idx, spread, lo, hi)) {
    out.push_back(idx);
    return;
  }
  cluster_rec(features, lo, cfg, out);
  cluster_rec(features, hi, cfg, out);
}

} // namespace

std::vector<std::vector<Trajectory>>
cluster_trajectories(const std::vector<Trajectory> &data,
                     const LearnConfig &cfg) {
  if (data.empty())
    return {};
  int dim = data.front().dim();
  std::vector<Eigen::VectorXd> features;
  features.reserve(data.size());
  for (const Trajectory &z : data) {
    if (z.dim() != dim)
      throw DomainError("trajectories disagree on dimension");
    if (static_cast<int>(z.sample_count()) < cfg.init_len)
      throw DomainError("trajectory shorter than the clustering prefix");
    features.push_back(prefix_feature(z, cfg.init_len));
  }
  std::vector<int> all(data.size());
  for (size_t i = 0; i < data.size(); ++i)
    all[i] = static_cast<int>(i);
  std::vector<std::vector<int>> groups;
  cluster_rec(features, all, cfg, groups);
  std::sort(groups.begin(), groups.end(),
            [](const auto &a, const auto &b) { return a.front() < b.front(); });
  std::vector<std::vector<Trajectory>> out;
  out.reserve(groups.size());
  for (const auto &g : groups) {
    std::vector<Trajectory> c;
    c.reserve(g.size());
    for (int i : g)
      c.push_back(data[static_cast<size_t>(i)]);
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

struct LineFit {
  Eigen::VectorXd intercept;
  Eigen::VectorXd slope;
  Eigen::VectorXd sigma; // per-dimension std, floored at 1e-3
};

constexpr double kSigmaFloor = 1e-3;

/* Per-dimension least squares over the given (trajectory, cutoff) pairs.
 * cutoff < 0 limits by sample count instead (the first max_samples). */
LineFit fit_lines(const std::vector<Trajectory> &cluster,
                  const std::vector<double> &cutoffs, int max_samples) {
  int dim = cluster.front().dim();
  LineFit fit;
  fit.intercept = Eigen::VectorXd::Zero(dim);
  fit.slope = Eigen::VectorXd::Zero(dim);
  fit.sigma = Eigen::VectorXd::Zero(dim);
  std::vector<double> ts;
  std::vector<Eigen::VectorXd> xs;
  for (size_t i = 0; i < cluster.size(); ++i) {
    const Trajectory &z = cluster[i];
    size_t n = z.sample_count();
    if (max_samples >= 0)
      n = std::min(n, static_cast<size_t>(max_samples));
    for (size_t j = 0; j < n; ++j) {
      double t = z.times()[j];
      if (!cutoffs.empty() && t > cutoffs[i] + kTol)
        break;
      ts.push_back(t);
      xs.push_back(z.point(j));
    }
  }
  size_t n = ts.size();
  double tbar = 0.0;
  for (double t : ts)
    tbar += t;
  tbar /= static_cast<double>(n);
  double sxx = 0.0;
  for (double t : ts)
    sxx += (t - tbar) * (t - tbar);
  for (int d = 0; d < dim; ++d) {
    double xbar = 0.0;
    for (const auto &x : xs)
      xbar += x(d);
    xbar /= static_cast<double>(n);
    double sxy = 0.0;
    for (size_t k = 0; k < n; ++k)
      sxy += (ts[k] - tbar) * (xs[k](d) - xbar);
    double b = sxx < 1e-30 ? 0.0 : sxy / sxx;
    double a = xbar - b * tbar;
    double ssr = 0.0;
    for (size_t k = 0; k < n; ++k) {
      double r = xs[k](d) - (a + b * ts[k]);
      ssr += r * r;
    }
    fit.intercept(d) = a;
    fit.slope(d) = b;
    fit.sigma(d) =
        std::max(std::sqrt(ssr / std::max<size_t>(1, n - 2)), kSigmaFloor);
  }
  return fit;
}

/* First sustained escape from the band around a fitted line: dev_window
 * consecutive samples past threshold stds in some dimension. Returns the
 * time of the window's first sample. Sample 0 never counts, so any
 * deviation time is positive. */
std::optional<double> scan_line_deviation(const Trajectory &z,
                                          const LineFit &fit, double threshold,
                                          int window) {
  int run = 0;
  size_t run_start = 0;
  for (size_t j = 1; j < z.sample_count(); ++j) {
    double t = z.times()[j];
    bool out = false;
    for (int d = 0; d < z.dim() && !out; ++d) {
      double mu = fit.intercept(d) + fit.slope(d) * t;
      out = std::abs(z.point(j)(d) - mu) / fit.sigma(d) > threshold;
    }
    if (out) {
      if (run == 0)
        run_start = j;
      if (++run >= window)
        return z.times()[run_start];
    } else {
      run = 0;
    }
  }
  return std::nullopt;
}

/* Same scan against a built template, mean continued along its last
 * segment and variance held constant past the horizon. */
std::optional<double> scan_atom_deviation(const Trajectory &z, const Atom &atom,
                                          double threshold, int window) {
  const DiagonalCovariance &cov = diagonal_of(atom, "deviation scan");
  int run = 0;
  size_t run_start = 0;
  for (size_t j = 1; j < z.sample_count(); ++j) {
    double t = z.times()[j];
    bool out = false;
    for (int d = 0; d < z.dim() && !out; ++d) {
      double mu = extend_eval(atom.mean()[d], t);
      double sd = std::sqrt(extend_hold(cov.variances[d], t));
      out = std::abs(z.point(j)(d) - mu) / sd > threshold;
    }
    if (out) {
      if (run == 0)
        run_start = j;
      if (++run >= window)
        return z.times()[run_start];
    } else {
      run = 0;
    }
  }
  return std::nullopt;
}

/* The min_traj-th largest value (all of them when fewer). Keeps the fit
 * supported by at least that many trajectories out to its horizon. */
double kth_largest(std::vector<double> v, int k) {
  std::sort(v.begin(), v.end(), std::greater<double>());
  size_t i = std::min(v.size(), static_cast<size_t>(std::max(1, k))) - 1;
  return v[i];
}

} // namespace

std::shared_ptr<const Atom> learn_atom(const std::vector<Trajectory> &cluster,
                                       const LearnConfig &cfg,
                                       const std::string &name) {
  if (cluster.empty())
    throw DomainError("cannot learn a template from no trajectories");
  int dim = cluster.front().dim();
  for (const Trajectory &z : cluster) {
    if (z.dim() != dim)
      throw DomainError("trajectories disagree on dimension");
    if (z.sample_count() < 2)
      throw DomainError("template needs at least two samples per trajectory");
  }
  double threshold = resolve_dev_threshold(cfg, dim);

  // Seed fit on the shared prefix, then find where each trajectory leaves
  // the band. The band end caps the refit window.
  LineFit seed = fit_lines(cluster, {}, cfg.init_len);
  std::vector<double> agree(cluster.size());
  double dev_max = 0.0;
  for (size_t i = 0; i < cluster.size(); ++i) {
    auto dev = scan_line_deviation(cluster[i], seed, threshold,
                                   cfg.dev_window);
    agree[i] = dev ? *dev : cluster[i].horizon();
    if (dev)
      dev_max = std::max(dev_max, *dev);
  }
  double span = std::max(kth_largest(agree, cfg.min_traj), dev_max);
  std::vector<double> cutoffs(cluster.size());
  for (size_t i = 0; i < cluster.size(); ++i)
    cutoffs[i] = std::min(agree[i], span);

  // Refit over the whole agreement window. The seed slope comes from a
  // short prefix and extrapolates badly over long horizons; the refit
  // slope does not.
  LineFit fit = fit_lines(cluster, cutoffs, -1);
  std::vector<double> agree1(cluster.size());
  double last_dev = 0.0;
  for (size_t i = 0; i < cluster.size(); ++i) {
    auto dev =
        scan_line_deviation(cluster[i], fit, threshold, cfg.dev_window);
    agree1[i] = dev ? *dev : cluster[i].horizon();
    if (dev)
      last_dev = std::max(last_dev, *dev);
  }
  double horizon = std::max(kth_largest(agree1, cfg.min_traj), last_dev);

  std::vector<PiecewiseLinear> mean;
  std::vector<PiecewiseLinear> variances;
  mean.reserve(dim);
  variances.reserve(dim);
  for (int d = 0; d < dim; ++d) {
    mean.emplace_back(std::vector<PiecewiseLinear::Breakpoint>{
        {0.0, fit.intercept(d)},
        {horizon, fit.intercept(d) + fit.slope(d) * horizon}});
    variances.push_back(
        PiecewiseLinear::constant(0.0, horizon, fit.sigma(d) * fit.sigma(d)));
  }
  return std::make_shared<Atom>(name, std::move(mean),
                                DiagonalCovariance{std::move(variances)});
}

AgreementSplit remove_agreement(const std::vector<Trajectory> &cluster,
                                const Atom &atom, const LearnConfig &cfg) {
  double threshold = resolve_dev_threshold(cfg, atom.dim());
  AgreementSplit split;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Trajectory &z : cluster) {
    if (z.dim() != atom.dim())
      throw DomainError("trajectory dimension does not match the template");
    auto dev = scan_atom_deviation(z, atom, threshold, cfg.dev_window);
    if (!dev)
      continue;
    lo = std::min(lo, *dev);
    hi = std::max(hi, *dev);
    split.last_deviation = std::max(split.last_deviation, *dev);
    Trajectory tail = z.shift(*dev);
    if (tail.sample_count() >= 2)
      split.tails.push_back(std::move(tail));
  }
  if (std::isfinite(lo))
    split.interval = UntilInterval{lo, hi};
  return split;
}

namespace {

void learn_dag_rec(AtomDag &dag, int parent,
                   const std::vector<Trajectory> &data, const LearnConfig &cfg,
                   int &counter, int depth) {
  if (depth > 64)
    throw Error("structure recursion exceeded its depth bound");
  std::vector<Trajectory> usable;
  for (const Trajectory &z : data)
    if (static_cast<int>(z.sample_count()) >= cfg.init_len)
      usable.push_back(z);
  if (static_cast<int>(usable.size()) < cfg.min_traj) {
    dag.add_edge(parent, AtomDag::kEnd);
    return;
  }
  bool attached = false;
  for (const auto &cluster : cluster_trajectories(usable, cfg)) {
    if (static_cast<int>(cluster.size()) < cfg.min_traj)
      continue;
    std::string name = "A" + std::to_string(counter++);
    auto atom = learn_atom(cluster, cfg, name);
    AgreementSplit split = remove_agreement(cluster, *atom, cfg);
    int id = dag.add_node(atom, split.interval);
    dag.add_edge(parent, id);
    attached = true;
    learn_dag_rec(dag, id, split.tails, cfg, counter, depth + 1);
  }
  if (!attached)
    dag.add_edge(parent, AtomDag::kEnd);
}

} // namespace

AtomDag learn_atom_dag(const std::vector<Trajectory> &data,
                       const LearnConfig &cfg) {
  AtomDag dag;
  int counter = 0;
  learn_dag_rec(dag, AtomDag::kStart, data, cfg, counter, 0);
  dag.validate();
  return dag;
}

double atom_similarity(const Atom &a, const Atom &b, const LearnConfig &cfg) {
  if (a.dim() != b.dim())
    throw DomainError("similarity needs templates of equal dimension");
  const DiagonalCovariance &ca = diagonal_of(a, "similarity");
  const DiagonalCovariance &cb = diagonal_of(b, "similarity");
  double shared = std::min(a.horizon(), b.horizon());
  int q = shared > kTol ? 20 : 1;
  double sum = 0.0;
  for (int k = 0; k < q; ++k) {
    double t = q == 1 ? 0.0 : shared * k / (q - 1);
    for (int d = 0; d < a.dim(); ++d) {
      bool ia = ca.variances[d].is_infinite();
      bool ib = cb.variances[d].is_infinite();
      if (ia && ib)
        continue;
      if (ia || ib) {
        sum += 1e9;
        continue;
      }
      double va = ca.variances[d].eval(t);
      double vb = cb.variances[d].eval(t);
      double delta = a.mean()[d].eval(t) - b.mean()[d].eval(t);
      sum += (va + delta * delta) / (2.0 * vb) +
             (vb + delta * delta) / (2.0 * va) - 1.0;
    }
  }
  double divergence = sum / (q * a.dim());
  double longest = std::max(a.horizon(), b.horizon());
  double stretch =
      longest > kTol ? std::abs(a.horizon() - b.horizon()) / longest : 0.0;
  return std::exp(-(divergence + cfg.merge_time_weight * stretch));
}

namespace {

int next_template_index(const AtomDag &dag) {
  int next = 0;
  for (int u : dag.internal_ids()) {
    const auto &n = dag.node(u);
    if (!n.atom)
      continue;
    const std::string &s = n.atom->name();
    if (s.size() < 2 || s[0] != 'A')
      continue;
    bool digits = true;
    for (size_t i = 1; i < s.size() && digits; ++i)
      digits = std::isdigit(static_cast<unsigned char>(s[i])) != 0;
    if (digits)
      next = std::max(next, std::stoi(s.substr(1)) + 1);
  }
  return next;
}

std::shared_ptr<const Atom> blend_atoms(const Atom &a, const Atom &b,
                                        const std::string &name) {
  const DiagonalCovariance &ca = diagonal_of(a, "merge");
  const DiagonalCovariance &cb = diagonal_of(b, "merge");
  double h = std::max(a.horizon(), b.horizon());
  std::vector<double> ts{0.0, h};
  for (double t : a.breakpoint_times())
    ts.push_back(t);
  for (double t : b.breakpoint_times())
    ts.push_back(t);
  std::sort(ts.begin(), ts.end());
  std::vector<double> grid;
  for (double t : ts)
    if (grid.empty() || t > grid.back() + kTol)
      grid.push_back(std::min(t, h));
  // Sampling at the union of breakpoints is exact for the affine means and
  // constant variances the learner produces, and a linear surrogate
  // otherwise.
  std::vector<PiecewiseLinear> mean;
  std::vector<PiecewiseLinear> variances;
  for (int d = 0; d < a.dim(); ++d) {
    bool ia = ca.variances[d].is_infinite();
    bool ib = cb.variances[d].is_infinite();
    std::vector<PiecewiseLinear::Breakpoint> mbp, vbp;
    for (double t : grid) {
      double ma = extend_eval(a.mean()[d], t);
      double mb = extend_eval(b.mean()[d], t);
      if (ia && ib) {
        mbp.push_back({t, 0.5 * (ma + mb)});
        vbp.push_back({t, std::numeric_limits<double>::infinity()});
        continue;
      }
      double va = ia ? 1e18 : extend_hold(ca.variances[d], t);
      double vb = ib ? 1e18 : extend_hold(cb.variances[d], t);
      double wa = 1.0 / va, wb = 1.0 / vb;
      mbp.push_back({t, (ma * wa + mb * wb) / (wa + wb)});
      vbp.push_back({t, 0.5 * (va + vb)});
    }
    mean.emplace_back(mbp);
    variances.emplace_back(vbp);
  }
  return std::make_shared<Atom>(name, std::move(mean),
                                DiagonalCovariance{std::move(variances)});
}

} // namespace

int merge_similar_atoms(AtomDag &dag, const LearnConfig &cfg) {
  int merges = 0;
  for (;;) {
    std::vector<int> internal = dag.internal_ids();
    int bu = -1, bv = -1;
    double best = cfg.merge_similarity_threshold;
    for (size_t i = 0; i < internal.size(); ++i) {
      int u = internal[i];
      if (!dag.node(u).atom)
        continue;
      for (size_t j = i + 1; j < internal.size(); ++j) {
        int v = internal[j];
        if (!dag.node(v).atom)
          continue;
        // Comparable nodes describe phases in sequence, not alternatives;
        // merging them would also close a cycle.
        if (dag.has_path(u, v) || dag.has_path(v, u))
          continue;
        double s =
            atom_similarity(*dag.node(u).atom, *dag.node(v).atom, cfg);
        if (s > best) {
          best = s;
          bu = u;
          bv = v;
        }
      }
    }
    if (bu < 0)
      break;
    const DagNode &nu = dag.node(bu);
    const DagNode &nv = dag.node(bv);
    std::string name = "A" + std::to_string(next_template_index(dag));
    auto merged = blend_atoms(*nu.atom, *nv.atom, name);
    std::optional<UntilInterval> interval;
    if (nu.interval && nv.interval)
      interval = UntilInterval{std::min(nu.interval->lo, nv.interval->lo),
                               std::max(nu.interval->hi, nv.interval->hi)};
    else
      interval = nu.interval ? nu.interval : nv.interval;
    std::set<int> parents(nu.parents.begin(), nu.parents.end());
    parents.insert(nv.parents.begin(), nv.parents.end());
    std::set<int> children(nu.children.begin(), nu.children.end());
    children.insert(nv.children.begin(), nv.children.end());
    parents.erase(bu);
    parents.erase(bv);
    children.erase(bu);
    children.erase(bv);
    int w = dag.add_node(merged, interval);
    for (int p : parents)
      dag.add_edge(p, w);
    for (int c : children)
      dag.add_edge(w, c);
    dag.remove_node(bu);
    dag.remove_node(bv);
    ++merges;
  }
  if (merges > 0)
    dag.validate();
  return merges;
}

namespace {

/* Longest-path depth from start, for choosing the innermost chain link. */
std::map<int, int> depths_from_start(const AtomDag &dag) {
  std::map<int, int> indeg, depth;
  std::deque<int> ready;
  for (int u : dag.ids()) {
    indeg[u] = static_cast<int>(dag.node(u).parents.size());
    depth[u] = 0;
    if (indeg[u] == 0)
      ready.push_back(u);
  }
  while (!ready.empty()) {
    int u = ready.front();
    ready.pop_front();
    for (int c : dag.node(u).children) {
      depth[c] = std::max(depth[c], depth[u] + 1);
      if (--indeg[c] == 0)
        ready.push_back(c);
    }
  }
  return depth;
}

bool try_extend(AtomDag &dag) {
  std::map<int, int> depth = depths_from_start(dag);
  int bu = -1, bv = -1;
  for (int u : dag.internal_ids()) {
    const DagNode &nu = dag.node(u);
    if (nu.children.size() != 1)
      continue;
    int v = nu.children.front();
    if (v == AtomDag::kEnd)
      continue;
    if (dag.node(v).parents.size() != 1)
      continue;
    if (bu < 0 || depth[u] > depth[bu] || (depth[u] == depth[bu] && u < bu)) {
      bu = u;
      bv = v;
    }
  }
  if (bu < 0)
    return false;
  const DagNode &nu = dag.node(bu);
  const DagNode &nv = dag.node(bv);
  bool pointlike =
      !nu.interval || nu.interval->hi - nu.interval->lo <= kTol;
  // A window observed at a single instant pins the hand-off; sequential
  // composition already says exactly that.
  FormulaPtr combined =
      pointlike ? Formula::concat(nu.fragment, nv.fragment)
                : Formula::until(nu.fragment, nv.fragment, nu.interval);
  std::vector<int> parents = nu.parents;
  std::vector<int> children = nv.children;
  std::optional<UntilInterval> interval = nv.interval;
  int w = dag.add_node(nullptr, interval);
  dag.node(w).fragment = combined;
  for (int p : parents)
    dag.add_edge(p, w);
  for (int c : children)
    dag.add_edge(w, c);
  dag.remove_node(bu);
  dag.remove_node(bv);
  return true;
}

bool try_join(AtomDag &dag) {
  std::vector<int> internal = dag.internal_ids();
  for (size_t i = 0; i < internal.size(); ++i)
    for (size_t j = i + 1; j < internal.size(); ++j) {
      int u = internal[i], v = internal[j];
      const DagNode &nu = dag.node(u);
      const DagNode &nv = dag.node(v);
      if (nu.parents != nv.parents || nu.children != nv.children)
        continue;
      FormulaPtr combined = Formula::disjunction(nu.fragment, nv.fragment);
      std::optional<UntilInterval> interval;
      if (nu.interval && nv.interval)
        interval = UntilInterval{std::min(nu.interval->lo, nv.interval->lo),
                                 std::max(nu.interval->hi, nv.interval->hi)};
      else
        interval = nu.interval ? nu.interval : nv.interval;
      std::vector<int> parents = nu.parents;
      std::vector<int> children = nu.children;
      int w = dag.add_node(nullptr, interval);
      dag.node(w).fragment = combined;
      for (int p : parents)
        dag.add_edge(p, w);
      for (int c : children)
        dag.add_edge(w, c);
      dag.remove_node(u);
      dag.remove_node(v);
      return true;
    }
  return false;
}

bool try_split(AtomDag &dag) {
  for (int u : dag.internal_ids()) {
    const DagNode &n = dag.node(u);
    if (n.children.size() < 2)
      continue;
    std::vector<int> parents = n.parents;
    std::vector<int> children = n.children;
    std::shared_ptr<const Atom> atom = n.atom;
    FormulaPtr fragment = n.fragment;
    std::optional<UntilInterval> interval = n.interval;
    int a = dag.add_node(atom, interval);
    dag.node(a).fragment = fragment;
    int b = dag.add_node(atom, interval);
    dag.node(b).fragment = fragment;
    for (int p : parents) {
      dag.add_edge(p, a);
      dag.add_edge(p, b);
    }
    dag.add_edge(a, children.front());
    for (size_t k = 1; k < children.size(); ++k)
      dag.add_edge(b, children[k]);
    dag.remove_node(u);
    return true;
  }
  return false;
}

} // namespace

FormulaPtr simplify_dag(AtomDag dag, std::vector<SimplifyStep> *trace) {
  dag.validate();
  std::vector<int> internal = dag.internal_ids();
  if (internal.empty())
    throw DomainError("graph has no templates to turn into a formula");
  for (int u : internal) {
    DagNode &n = dag.node(u);
    if (!n.fragment)
      n.fragment = Formula::atom(n.atom);
  }
  while (dag.size() > 3) {
    long long before = dag.phi();
    const char *op = nullptr;
    if (try_extend(dag))
      op = "extend";
    else if (try_join(dag))
      op = "join";
    else if (try_split(dag))
      op = "split";
    else
      throw Error("no rewrite applies to a graph with several nodes");
    long long after = dag.phi();
    if (after >= before)
      throw Error("rewrite failed to shrink the graph potential");
    if (op[0] == 's' && after != before - 1)
      throw Error("partitioning changed the potential by more than one");
    if (trace)
      trace->push_back(SimplifyStep{op, before, after});
  }
  return dag.node(dag.internal_ids().front()).fragment;
}

LearnResult learn_fpl(const std::vector<Trajectory> &data,
                      const LearnConfig &cfg) {
  if (cfg.init_len < 2)
    throw DomainError("clustering prefix needs at least two samples");
  if (cfg.min_traj < 2)
    throw DomainError("a template needs at least two trajectories");
  if (cfg.dev_window < 1)
    throw DomainError("deviation window must be at least one sample");
  if (cfg.dev_threshold < 0.0 || cfg.cluster_std_threshold <= 0.0 ||
      cfg.merge_similarity_threshold <= 0.0 || cfg.merge_time_weight < 0.0)
    throw DomainError("learning thresholds must be positive");
  if (static_cast<int>(data.size()) < cfg.min_traj)
    throw DomainError("fewer trajectories than the per-template minimum");
  int dim = data.front().dim();
  for (const Trajectory &z : data)
    if (z.dim() != dim)
      throw DomainError("trajectories disagree on dimension");

  AtomDag dag = learn_atom_dag(data, cfg);
  int before = static_cast<int>(dag.internal_ids().size());
  if (before == 0)
    throw DomainError("no group of trajectories was consistent enough to fit");
  merge_similar_atoms(dag, cfg);
  int after = static_cast<int>(dag.internal_ids().size());

  std::vector<SimplifyStep> trace;
  FormulaPtr formula = simplify_dag(dag, &trace);

  AtomCatalog atoms(dim);
  for (const AtomRef &ref : collect_atoms(formula)) {
    if (ref.is_top())
      continue;
    if (!atoms.contains(ref.atom()->name()))
      atoms.add(ref.atom()->name(), ref);
  }
  return LearnResult{formula, std::move(atoms), std::move(dag),
                     before,  after,            std::move(trace)};
}

} // namespace fpl
