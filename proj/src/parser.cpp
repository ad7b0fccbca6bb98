#include "fpl/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <optional>

#include "fpl/errors.hpp"
#include "fpl/format.hpp"

namespace fpl {

namespace {

struct Lexer {
  const std::string &text;
  size_t pos = 0;

  explicit Lexer(const std::string &t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }

  char peek_char() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c))
      throw ParseError(std::string("expected '") + c + "'", pos);
  }

  /* Identifier at the cursor, or empty if none. Does not consume. */
  std::string peek_ident() {
    skip_ws();
    size_t p = pos;
    if (p >= text.size() ||
        (!std::isalpha(static_cast<unsigned char>(text[p])) &&
         text[p] != '_'))
      return {};
    size_t start = p;
    while (p < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[p])) ||
            text[p] == '_'))
      ++p;
    return text.substr(start, p - start);
  }

  std::string take_ident() {
    std::string id = peek_ident();
    if (id.empty())
      throw ParseError("expected an identifier", pos);
    pos += id.size();
    return id;
  }

  double take_number() {
    skip_ws();
    const char *begin = text.c_str() + pos;
    char *end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin)
      throw ParseError("expected a number", pos);
    pos += static_cast<size_t>(end - begin);
    return v;
  }
};

struct Parser {
  Lexer lex;
  const AtomCatalog &catalog;

  Parser(const std::string &text, const AtomCatalog &cat)
      : lex(text), catalog(cat) {}

  FormulaPtr run() {
    FormulaPtr f = parse_or();
    if (!lex.at_end())
      throw ParseError("trailing input after formula", lex.pos);
    return f;
  }

  FormulaPtr parse_or() {
    FormulaPtr l = parse_until();
    while (lex.peek_char() == '|') {
      lex.expect('|');
      l = Formula::disjunction(l, parse_until());
    }
    return l;
  }

  /* "U_(lo,hi)" lexes as the identifier "U_" followed by '('; both plain
   * "U" and "U_" start an until. */
  bool at_until_keyword() {
    std::string id = lex.peek_ident();
    return id == "U" || id == "U_";
  }

  FormulaPtr parse_until() {
    FormulaPtr l = parse_cat();
    if (!at_until_keyword())
      return l;
    lex.pos += 1; // the 'U'
    std::optional<UntilInterval> interval;
    if (lex.pos < lex.text.size() && lex.text[lex.pos] == '_') {
      ++lex.pos;
      lex.expect('(');
      double lo = lex.take_number();
      lex.expect(',');
      double hi = lex.take_number();
      lex.expect(')');
      if (lo < 0 || hi < lo)
        throw ParseError("switch interval must satisfy 0 <= lo <= hi",
                         lex.pos);
      interval = UntilInterval{lo, hi};
    }
    return Formula::until(l, parse_until(), interval);
  }

  FormulaPtr parse_cat() {
    FormulaPtr l = parse_primary();
    if (lex.peek_char() == '.') {
      lex.expect('.');
      return Formula::concat(l, parse_cat());
    }
    return l;
  }

  FormulaPtr parse_primary() {
    if (lex.consume('(')) {
      FormulaPtr f = parse_or();
      lex.expect(')');
      return f;
    }
    std::string id = lex.peek_ident();
    if (id.empty())
      throw ParseError("expected an atom, TOP[t], F[t] or '('", lex.pos);
    if (id == "TOP") {
      lex.pos += id.size();
      lex.expect('[');
      double h = lex.take_number();
      lex.expect(']');
      if (h < 0)
        throw ParseError("TOP horizon must be non-negative", lex.pos);
      return Formula::top(h, catalog.dim());
    }
    if (id == "F") {
      lex.pos += id.size();
      lex.expect('[');
      double h = lex.take_number();
      lex.expect(']');
      if (h < 0)
        throw ParseError("F horizon must be non-negative", lex.pos);
      return Formula::until(Formula::top(h, catalog.dim()), parse_primary());
    }
    if (id == "U")
      throw ParseError("U is an operator, not an atom", lex.pos);
    lex.pos += id.size();
    if (!catalog.contains(id))
      throw ParseError("unknown atom '" + id + "'", lex.pos);
    return Formula::leaf(catalog.at(id));
  }
};

std::string emit_operand(const FormulaPtr &f);

std::string emit_node(const FormulaPtr &f) {
  switch (f->kind()) {
  case Formula::Kind::Leaf: {
    const AtomRef &ref = f->leaf_ref();
    if (ref.is_top())
      return "TOP[" + format_shortest(ref.top().horizon) + "]";
    return ref.atom()->name();
  }
  case Formula::Kind::Or:
    return emit_operand(f->left()) + " | " + emit_operand(f->right());
  case Formula::Kind::Concat:
    return emit_operand(f->left()) + " . " + emit_operand(f->right());
  case Formula::Kind::Until: {
    std::string op = "U";
    if (f->until_interval())
      op += "_(" + format_shortest(f->until_interval()->lo) + "," +
            format_shortest(f->until_interval()->hi) + ")";
    return emit_operand(f->left()) + " " + op + " " +
           emit_operand(f->right());
  }
  }
  throw Error("unreachable formula kind");
}

std::string emit_operand(const FormulaPtr &f) {
  if (f->is_leaf())
    return emit_node(f);
  return "(" + emit_node(f) + ")";
}

} // namespace

FormulaPtr parse_formula(const std::string &text, const AtomCatalog &catalog) {
  return Parser(text, catalog).run();
}

std::string emit_formula(const FormulaPtr &f) {
  return emit_node(f);
}

} // namespace fpl
