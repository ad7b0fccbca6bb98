#ifndef FPL_FUZZY_PATH_HPP
#define FPL_FUZZY_PATH_HPP

#include <vector>

#include "fpl/atom.hpp"

namespace fpl {

/* One step of a fuzzy path: an atom (or top) followed for trunc time
 * units, trunc <= the atom's horizon. trunc = 0 only arises from an Until
 * switching immediately; such a step still pins the single time point 0. */
struct PathElement {
  AtomRef ref;
  double trunc = 0.0;
};

/* A concrete alternative a formula admits: atoms followed one after
 * another, each for its truncation time. */
struct FuzzyPath {
  std::vector<PathElement> elements;

  double total_horizon() const {
    double h = 0.0;
    for (const auto &e : elements)
      h += e.trunc;
    return h;
  }
};

/* Structural equality: same atoms (by identity; tops by value) truncated
 * at exactly the same times. Used to deduplicate path sets. */
bool operator==(const FuzzyPath &a, const FuzzyPath &b);

/* Arbitrary but strict total order for canonical path-set ordering. */
bool path_less(const FuzzyPath &a, const FuzzyPath &b);

} // namespace fpl

#endif
