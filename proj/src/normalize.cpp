#include "fpl/normalize.hpp"

#include <algorithm>

#include "fpl/errors.hpp"
#include "fpl/plf.hpp"
#include "fpl/semantics.hpp"

namespace fpl {

namespace {

constexpr int kMaxLnfNodes = 10000;
constexpr size_t kMaxPaths = 1000000;

/* Counts every node the rewrite allocates; the blow-up guard. */
struct LnfBuilder {
  int created = 0;

  void bump() {
    if (++created > kMaxLnfNodes)
      throw CapacityError("normalization exceeded " +
                          std::to_string(kMaxLnfNodes) + " nodes");
  }

  FormulaPtr disj(FormulaPtr l, FormulaPtr r) {
    bump();
    return Formula::disjunction(std::move(l), std::move(r));
  }
  FormulaPtr cat(FormulaPtr l, FormulaPtr r) {
    bump();
    return Formula::concat(std::move(l), std::move(r));
  }
  FormulaPtr unt(FormulaPtr l, FormulaPtr r,
                 std::optional<UntilInterval> iv) {
    bump();
    return Formula::until(std::move(l), std::move(r), std::move(iv));
  }

  /* A . B with A already in normal form. */
  FormulaPtr rebuild_concat(const FormulaPtr &a, const FormulaPtr &b) {
    switch (a->kind()) {
    case Formula::Kind::Leaf:
      return cat(a, b);
    case Formula::Kind::Or:
      return disj(rebuild_concat(a->left(), b),
                  rebuild_concat(a->right(), b));
    case Formula::Kind::Concat:
      return cat(a->left(), rebuild_concat(a->right(), b));
    case Formula::Kind::Until:
      return unt(a->left(), rebuild_concat(a->right(), b),
                 a->until_interval());
    }
    throw Error("unreachable formula kind");
  }

  /* A U B with A already in normal form; iv is the original until's
   * switch window. */
  FormulaPtr rebuild_until(const FormulaPtr &a, const FormulaPtr &b,
                           std::optional<UntilInterval> iv) {
    switch (a->kind()) {
    case Formula::Kind::Leaf:
      return unt(a, b, iv);
    case Formula::Kind::Or:
      return disj(rebuild_until(a->left(), b, iv),
                  rebuild_until(a->right(), b, iv));
    case Formula::Kind::Concat:
      // switch inside the head keeps the original window; the
      // alternative switching inside the tail runs on a re-based clock
      return disj(rebuild_until(a->left(), b, iv),
                  cat(a->left(), rebuild_until(a->right(), b, {})));
    case Formula::Kind::Until:
      // the new outer until switches exactly when the old inner one did
      return unt(a->left(), rebuild_until(a->right(), b, {}),
                 a->until_interval());
    }
    throw Error("unreachable formula kind");
  }

  FormulaPtr normalize(const FormulaPtr &f) {
    switch (f->kind()) {
    case Formula::Kind::Leaf:
      return f;
    case Formula::Kind::Or: {
      auto l = normalize(f->left());
      auto r = normalize(f->right());
      if (l == f->left() && r == f->right())
        return f;
      return disj(std::move(l), std::move(r));
    }
    case Formula::Kind::Concat: {
      auto l = normalize(f->left());
      auto r = normalize(f->right());
      if (l->is_leaf() && l == f->left() && r == f->right())
        return f;
      return rebuild_concat(l, r);
    }
    case Formula::Kind::Until: {
      auto l = normalize(f->left());
      auto r = normalize(f->right());
      if (l->is_leaf() && l == f->left() && r == f->right())
        return f;
      return rebuild_until(l, r, f->until_interval());
    }
    }
    throw Error("unreachable formula kind");
  }
};

void check_path_budget(size_t n) {
  if (n > kMaxPaths)
    throw CapacityError("fuzzy path enumeration exceeded " +
                        std::to_string(kMaxPaths) + " paths");
}

std::vector<FuzzyPath> dedupe(std::vector<FuzzyPath> paths) {
  std::sort(paths.begin(), paths.end(), path_less);
  paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
  return paths;
}

/* Enumeration runs on normal-form formulas only, where the left side of
 * every until is a single template and a switch cut never straddles an
 * element boundary. */

std::vector<FuzzyPath> enumerate(const FormulaPtr &f, double grid) {
  switch (f->kind()) {
  case Formula::Kind::Leaf: {
    FuzzyPath p;
    p.elements.push_back({f->leaf_ref(), f->leaf_ref().horizon()});
    return {p};
  }
  case Formula::Kind::Or: {
    auto l = enumerate(f->left(), grid);
    auto r = enumerate(f->right(), grid);
    check_path_budget(l.size() + r.size());
    l.insert(l.end(), r.begin(), r.end());
    return dedupe(std::move(l));
  }
  case Formula::Kind::Concat: {
    auto l = enumerate(f->left(), grid);
    auto r = enumerate(f->right(), grid);
    check_path_budget(l.size() * r.size());
    std::vector<FuzzyPath> out;
    out.reserve(l.size() * r.size());
    for (const auto &p1 : l)
      for (const auto &p2 : r) {
        FuzzyPath q = p1;
        q.elements.insert(q.elements.end(), p2.elements.begin(),
                          p2.elements.end());
        out.push_back(std::move(q));
      }
    return dedupe(std::move(out));
  }
  case Formula::Kind::Until: {
    if (!f->left()->is_leaf())
      throw Error("path enumeration expects a normal-form formula");
    // switch times on the left template's own clock, matching the grid
    // the recursive approximator explores
    const AtomRef &ref = f->left()->leaf_ref();
    std::vector<double> cuts =
        until_switch_times(ref.horizon(), grid, f->until_interval());
    auto tails = enumerate(f->right(), grid);
    check_path_budget(cuts.size() * tails.size());
    std::vector<FuzzyPath> out;
    out.reserve(cuts.size() * tails.size());
    for (double u : cuts)
      for (const auto &t : tails) {
        FuzzyPath q;
        q.elements.reserve(1 + t.elements.size());
        q.elements.push_back({ref, u});
        q.elements.insert(q.elements.end(), t.elements.begin(),
                          t.elements.end());
        out.push_back(std::move(q));
      }
    return dedupe(std::move(out));
  }
  }
  throw Error("unreachable formula kind");
}

} // namespace

FormulaPtr to_lnf(const FormulaPtr &f) {
  LnfBuilder b;
  return b.normalize(f);
}

std::vector<FuzzyPath> fuzzy_paths(const FormulaPtr &f, double grid) {
  if (!(grid > 0))
    throw DomainError("fuzzy path grid step must be positive");
  /* Degenerate zero-length truncations carry a worst-case contribution,
   * so the admitted set is only well defined on the normal form, where
   * every switch cuts a single template. */
  return enumerate(is_lnf(f) ? f : to_lnf(f), grid);
}

} // namespace fpl
