#ifndef FPL_TRAJECTORY_IO_HPP
#define FPL_TRAJECTORY_IO_HPP

#include <string>

#include "fpl/trajectory.hpp"

namespace fpl {

/* CSV with header "t,s1,...,sn" followed by numeric rows. The first row
 * must be at time 0 and times must increase strictly. Signal column names
 * are free-form; only their count matters. */
Trajectory parse_trajectory(const std::string &csv_text);

std::string emit_trajectory(const Trajectory &z);

} // namespace fpl

#endif
