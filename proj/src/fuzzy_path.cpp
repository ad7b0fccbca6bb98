#include "fpl/fuzzy_path.hpp"

#include <tuple>

namespace fpl {

namespace {

/* Orderable stand-in for one element. Tops (identity nullptr) carry their
 * value so that equal tops compare equal wherever they came from. */
std::tuple<const void *, double, double, int> key(const PathElement &e) {
  if (e.ref.is_top())
    return {nullptr, e.trunc, e.ref.top().horizon, e.ref.top().dim};
  return {e.ref.identity(), e.trunc, 0.0, 0};
}

} // namespace

bool operator==(const FuzzyPath &a, const FuzzyPath &b) {
  if (a.elements.size() != b.elements.size())
    return false;
  for (size_t i = 0; i < a.elements.size(); ++i)
    if (key(a.elements[i]) != key(b.elements[i]))
      return false;
  return true;
}

bool path_less(const FuzzyPath &a, const FuzzyPath &b) {
  size_t n = std::min(a.elements.size(), b.elements.size());
  for (size_t i = 0; i < n; ++i) {
    auto ka = key(a.elements[i]);
    auto kb = key(b.elements[i]);
    if (ka != kb)
      return ka < kb;
  }
  return a.elements.size() < b.elements.size();
}

} // namespace fpl
