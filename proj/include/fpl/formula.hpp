#ifndef FPL_FORMULA_HPP
#define FPL_FORMULA_HPP

#include <memory>
#include <optional>
#include <vector>

#include "fpl/atom.hpp"

namespace fpl {

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/* Learned switch-time window for an Until: the hand-off from left operand
 * to right operand was observed between lo and hi. Used to narrow the
 * evaluation grid; never changes what the formula means. */
struct UntilInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/* Immutable formula tree. Leaves are atoms or top; inner nodes are
 * disjunction, concatenation and until. Negation and conjunction are
 * deliberately absent from the language. */
class Formula {
public:
  enum class Kind { Leaf, Or, Concat, Until };

  static FormulaPtr atom(std::shared_ptr<const Atom> a);
  static FormulaPtr top(double horizon, int dim);
  static FormulaPtr leaf(AtomRef ref);
  static FormulaPtr disjunction(FormulaPtr l, FormulaPtr r);
  static FormulaPtr concat(FormulaPtr l, FormulaPtr r);
  static FormulaPtr until(FormulaPtr l, FormulaPtr r,
                          std::optional<UntilInterval> interval = {});

  Kind kind() const { return kind_; }
  bool is_leaf() const { return kind_ == Kind::Leaf; }
  const AtomRef &leaf_ref() const { return *ref_; }
  const FormulaPtr &left() const { return left_; }
  const FormulaPtr &right() const { return right_; }
  const std::optional<UntilInterval> &until_interval() const {
    return interval_;
  }

  int dim() const { return dim_; }

private:
  Formula(Kind kind, std::optional<AtomRef> ref, FormulaPtr l, FormulaPtr r,
          std::optional<UntilInterval> interval);

  Kind kind_;
  std::optional<AtomRef> ref_;
  FormulaPtr left_, right_;
  std::optional<UntilInterval> interval_;
  int dim_;
};

/* All leaf references in left-to-right order (a multiset: shared atoms can
 * appear many times, and do after normalization). */
std::vector<AtomRef> collect_atoms(const FormulaPtr &f);

/* Smallest horizon over all leaves, top included. */
double h_min(const FormulaPtr &f);

/* Number of Until nodes. */
int count_until(const FormulaPtr &f);

/* Number of Concat plus Until nodes. */
int count_concat_until(const FormulaPtr &f);

/* Total node count (leaves + operators). */
int node_count(const FormulaPtr &f);

/* True when every Concat and Until has an atomic (leaf) left operand. */
bool is_lnf(const FormulaPtr &f);

} // namespace fpl

#endif
