#include "fpl/formula.hpp"

#include <algorithm>

#include "fpl/errors.hpp"

namespace fpl {

Formula::Formula(Kind kind, std::optional<AtomRef> ref, FormulaPtr l,
                 FormulaPtr r, std::optional<UntilInterval> interval)
    : kind_(kind), ref_(std::move(ref)), left_(std::move(l)),
      right_(std::move(r)), interval_(std::move(interval)) {
  if (kind_ == Kind::Leaf) {
    dim_ = ref_->dim();
  } else {
    if (left_->dim() != right_->dim())
      throw DomainError("formula operands have mismatched dimensions");
    dim_ = left_->dim();
  }
  if (interval_) {
    if (kind_ != Kind::Until)
      throw DomainError("switch interval only makes sense on an Until");
    if (interval_->lo < 0 || interval_->hi < interval_->lo)
      throw DomainError("switch interval must satisfy 0 <= lo <= hi");
  }
}

FormulaPtr Formula::atom(std::shared_ptr<const Atom> a) {
  return leaf(AtomRef(std::move(a)));
}

FormulaPtr Formula::top(double horizon, int dim) {
  if (horizon < 0 || dim <= 0)
    throw DomainError("top needs a non-negative horizon and positive "
                      "dimension");
  return leaf(AtomRef(TopAtom{horizon, dim}));
}

FormulaPtr Formula::leaf(AtomRef ref) {
  return FormulaPtr(
      new Formula(Kind::Leaf, std::move(ref), nullptr, nullptr, {}));
}

FormulaPtr Formula::disjunction(FormulaPtr l, FormulaPtr r) {
  return FormulaPtr(
      new Formula(Kind::Or, {}, std::move(l), std::move(r), {}));
}

FormulaPtr Formula::concat(FormulaPtr l, FormulaPtr r) {
  return FormulaPtr(
      new Formula(Kind::Concat, {}, std::move(l), std::move(r), {}));
}

FormulaPtr Formula::until(FormulaPtr l, FormulaPtr r,
                          std::optional<UntilInterval> interval) {
  return FormulaPtr(new Formula(Kind::Until, {}, std::move(l), std::move(r),
                                std::move(interval)));
}

std::vector<AtomRef> collect_atoms(const FormulaPtr &f) {
  std::vector<AtomRef> out;
  auto walk = [&](auto &&self, const FormulaPtr &g) -> void {
    if (g->is_leaf()) {
      out.push_back(g->leaf_ref());
      return;
    }
    self(self, g->left());
    self(self, g->right());
  };
  walk(walk, f);
  return out;
}

double h_min(const FormulaPtr &f) {
  if (f->is_leaf())
    return f->leaf_ref().horizon();
  return std::min(h_min(f->left()), h_min(f->right()));
}

int count_until(const FormulaPtr &f) {
  if (f->is_leaf())
    return 0;
  int self = f->kind() == Formula::Kind::Until ? 1 : 0;
  return self + count_until(f->left()) + count_until(f->right());
}

int count_concat_until(const FormulaPtr &f) {
  if (f->is_leaf())
    return 0;
  int self = f->kind() != Formula::Kind::Or ? 1 : 0;
  return self + count_concat_until(f->left()) + count_concat_until(f->right());
}

int node_count(const FormulaPtr &f) {
  if (f->is_leaf())
    return 1;
  return 1 + node_count(f->left()) + node_count(f->right());
}

bool is_lnf(const FormulaPtr &f) {
  if (f->is_leaf())
    return true;
  if (f->kind() != Formula::Kind::Or && !f->left()->is_leaf())
    return false;
  return is_lnf(f->left()) && is_lnf(f->right());
}

} // namespace fpl
