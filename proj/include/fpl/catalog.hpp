#ifndef FPL_CATALOG_HPP
#define FPL_CATALOG_HPP

#include <map>
#include <string>
#include <vector>

#include "fpl/atom.hpp"

namespace fpl {

/* Named atoms sharing one dimension; what formula text resolves names
 * against. Entry order is preserved so emission is stable. */
class AtomCatalog {
public:
  explicit AtomCatalog(int dim);

  int dim() const { return dim_; }
  const std::vector<std::pair<std::string, AtomRef>> &entries() const {
    return entries_;
  }

  /* Name must be a fresh valid identifier; the atom must match dim. */
  void add(const std::string &name, AtomRef ref);

  bool contains(const std::string &name) const;
  const AtomRef &at(const std::string &name) const;

private:
  int dim_;
  std::vector<std::pair<std::string, AtomRef>> entries_;
  std::map<std::string, size_t> index_;
};

/* Parse the catalog JSON:
 *   {"dim": n, "atoms": [{"name": ..., "horizon": ...,
 *      "mean": [plf, ...],
 *      "cov": {"kind": "diagonal"|"full", "entries": ...}}, ...]}
 * where plf = [[t, v], ...] and a diagonal variance value may be the
 * string "inf". An entry {"name", "horizon", "top": true} declares a named
 * top template instead. */
AtomCatalog parse_atoms(const std::string &json_text);

std::string emit_atoms(const AtomCatalog &catalog);

} // namespace fpl

#endif
