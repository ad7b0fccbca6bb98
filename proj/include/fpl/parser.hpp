#ifndef FPL_PARSER_HPP
#define FPL_PARSER_HPP

#include <string>

#include "fpl/catalog.hpp"
#include "fpl/formula.hpp"

namespace fpl {

/* Formula text over the catalog's atom names.
 *
 * Grammar (precedence low to high: |, U, . ; U and . right-associative,
 * | left-associative):
 *   or      := until ('|' until)*
 *   until   := cat ('U' interval? until)?
 *   cat     := primary ('.' cat)?
 *   primary := IDENT | 'TOP' '[' number ']'
 *            | 'F' '[' number ']' primary | '(' or ')'
 *   interval := '_' '(' number ',' number ')'
 *
 * F[t] p is sugar for TOP[t] U p and is expanded while parsing.
 * U, F and TOP are reserved words, never atom names. */
FormulaPtr parse_formula(const std::string &text, const AtomCatalog &catalog);

/* Render a formula back to text. Compound operands are always
 * parenthesized, so parse(emit(f)) reproduces f node for node and
 * emit(parse(s)) is idempotent on strings. */
std::string emit_formula(const FormulaPtr &f);

} // namespace fpl

#endif
