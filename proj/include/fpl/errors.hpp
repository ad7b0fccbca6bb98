#ifndef FPL_ERRORS_HPP
#define FPL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fpl {

/* Base class for everything this library throws on bad input or bad state.
 * CLI maps these to exit code 1; anything else escaping is a bug. */
class Error : public std::runtime_error {
public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

/* Malformed formula text, atom JSON, trajectory CSV or automaton JSON. */
class ParseError : public Error {
public:
  ParseError(const std::string &msg, size_t pos)
      : Error(msg + " (at offset " + std::to_string(pos) + ")"), pos_(pos) {}
  explicit ParseError(const std::string &msg) : Error(msg), pos_(0) {}
  size_t position() const { return pos_; }

private:
  size_t pos_;
};

/* Structurally valid input that violates a domain precondition
 * (evaluation outside a domain, dimension mismatch, bad config...). */
class DomainError : public Error {
public:
  explicit DomainError(const std::string &msg) : Error(msg) {}
};

/* Full covariance matrix not usable at the requested time. */
class SingularCovariance : public DomainError {
public:
  explicit SingularCovariance(const std::string &msg) : DomainError(msg) {}
};

/* A guard against combinatorial blow-up tripped (LNF node count,
 * oracle path count, hybrid run count). */
class CapacityError : public Error {
public:
  explicit CapacityError(const std::string &msg) : Error(msg) {}
};

} // namespace fpl

#endif
