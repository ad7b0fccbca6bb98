#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpl/catalog.hpp"
#include "fpl/formula.hpp"
#include "fpl/trajectory.hpp"

namespace fpl {

struct LearnConfig {
  int init_len = 10;  // samples used for clustering and the seed fit
  int min_traj = 5;   // smallest group of trajectories worth a template
  double dev_threshold = 0.0; // std multiples; 0 picks 4 for 1-D, 3 otherwise
  int dev_window = 3;         // consecutive out-of-band samples that count
  double cluster_std_threshold = 0.5;
  double merge_similarity_threshold = 0.7;
  double merge_time_weight = 0.5; // weight of horizon mismatch in similarity
};

double resolve_dev_threshold(const LearnConfig &cfg, int dim);

/* Node of the learned graph. Internal nodes carry a template (or, during
 * simplification, a formula fragment) plus the hand-off window into their
 * children. Start and end carry neither. */
struct DagNode {
  std::shared_ptr<const Atom> atom;
  FormulaPtr fragment;
  std::optional<UntilInterval> interval;
  std::vector<int> parents;
  std::vector<int> children;
};

/* Acyclic graph with one start (id 0, no parents) and one end (id 1, no
 * children); every internal node lies on a start-to-end path. */
class AtomDag {
public:
  static constexpr int kStart = 0;
  static constexpr int kEnd = 1;

  AtomDag();

  int add_node(std::shared_ptr<const Atom> atom,
               std::optional<UntilInterval> interval);
  void add_edge(int from, int to);
  void remove_node(int id);

  bool has_node(int id) const;
  const DagNode &node(int id) const;
  DagNode &node(int id);
  std::vector<int> ids() const;
  std::vector<int> internal_ids() const;
  int size() const { return static_cast<int>(nodes_.size()); }

  /* True when `to` is reachable from `from` along edges. */
  bool has_path(int from, int to) const;

  /* Split potential: how many child-partitioning steps the graph still
   * admits. 0 for a pure chain. */
  long long psi() const;

  /* Simplification potential: internal node count plus twice psi. Every
   * rewrite strictly decreases it, which bounds the simplification loop. */
  long long phi() const;

  /* Throws Error when the graph shape is broken (cycle, stray node, start
   * with parents, end with children, internal node without content). */
  void validate() const;

private:
  std::map<int, DagNode> nodes_;
  int next_id_ = 2;
};

/* Groups trajectories by their first init_len samples: below the pooled-std
 * threshold everything stays together, otherwise recursive two-centroid
 * bisection splits while the halves explain most of the group's spread.
 * Deterministic for a fixed input order. */
std::vector<std::vector<Trajectory>>
cluster_trajectories(const std::vector<Trajectory> &data,
                     const LearnConfig &cfg);

/* Fits one template to a cluster: per-dimension least-squares line seeded
 * on the shared prefix, refitted over the agreement window, constant std
 * floored at 1e-3. The horizon covers the last deviation and keeps at
 * least min_traj trajectories in band. */
std::shared_ptr<const Atom> learn_atom(const std::vector<Trajectory> &cluster,
                                       const LearnConfig &cfg,
                                       const std::string &name);

struct AgreementSplit {
  std::vector<Trajectory> tails; // suffixes from each deviation, re-based
  double last_deviation = 0.0;   // largest deviation time; 0 when none
  std::optional<UntilInterval> interval; // [earliest, latest] deviation
};

/* Splits a cluster at the first sustained deviation from the template:
 * dev_window consecutive samples beyond dev_threshold stds in any
 * dimension. Trajectories that never deviate contribute no tail. */
AgreementSplit remove_agreement(const std::vector<Trajectory> &cluster,
                                const Atom &atom, const LearnConfig &cfg);

/* Recursive structure learning: cluster, fit a template per cluster, split
 * off the post-deviation tails and descend. Returns the raw graph. */
AtomDag learn_atom_dag(const std::vector<Trajectory> &data,
                       const LearnConfig &cfg);

/* Similarity in (0, 1]: symmetric Gaussian divergence averaged over 20
 * shared sample times and all dimensions, plus weighted relative horizon
 * mismatch, pushed through exp(-x). Identical templates score 1. */
double atom_similarity(const Atom &a, const Atom &b, const LearnConfig &cfg);

/* Greedily merges the most similar template pair above the threshold until
 * none qualifies. Ancestor-descendant pairs never merge, which also keeps
 * the graph acyclic. Returns the number of merges. */
int merge_similar_atoms(AtomDag &dag, const LearnConfig &cfg);

struct SimplifyStep {
  std::string op; // "extend", "join" or "split"
  long long phi_before = 0;
  long long phi_after = 0;
};

/* Rewrites the graph to start -> node -> end and returns that node's
 * formula. Chain links collapse into until (or concatenation when the
 * hand-off window is a single instant), parallel twins into disjunction,
 * and multi-child nodes split when nothing else applies. Each step is
 * recorded in the optional trace. */
FormulaPtr simplify_dag(AtomDag dag,
                        std::vector<SimplifyStep> *trace = nullptr);

struct LearnResult {
  FormulaPtr formula;
  AtomCatalog atoms;
  AtomDag dag; // after template merging, before simplification
  int nodes_before_merge = 0;
  int nodes_after_merge = 0;
  std::vector<SimplifyStep> trace;
};

/* Full pipeline: learn the graph, merge similar templates, simplify to a
 * formula. Deterministic for fixed config and input order. */
LearnResult learn_fpl(const std::vector<Trajectory> &data,
                      const LearnConfig &cfg);

} // namespace fpl
