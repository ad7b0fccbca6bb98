#ifndef FPL_FORMAT_HPP
#define FPL_FORMAT_HPP

#include <string>

namespace fpl {

/* Shortest decimal string that round-trips the value exactly ("3", "0.25",
 * "1e-06"). Serializers use this so emit/parse is identity. */
std::string format_shortest(double v);

/* Fixed-point with 6 decimals, or the literal "inf"; the only numeric
 * output format the command-line tool prints. */
std::string format_fixed6(double v);

} // namespace fpl

#endif
