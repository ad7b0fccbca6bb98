#ifndef FPL_SVG_HPP
#define FPL_SVG_HPP

#include <memory>
#include <string>
#include <vector>

#include "fpl/atom.hpp"
#include "fpl/trajectory.hpp"

namespace fpl {

/* Static SVG chart of templates against trajectories, one panel per signal
 * dimension. Each template contributes a shaded band at one standard
 * deviation around its mean (omitted where the variance is unconstrained)
 * and a thick mean polyline; each trajectory contributes one thin polyline.
 * Rendering is pure text with fixed 3-decimal coordinates: identical inputs
 * give identical bytes. Either list may be empty, not both. */
std::string render_svg(const std::vector<std::shared_ptr<const Atom>> &atoms,
                       const std::vector<Trajectory> &trajectories);

} // namespace fpl

#endif
