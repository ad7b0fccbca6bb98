#include "doctest.h"

#include <random>

#include "fpl/catalog.hpp"
#include "fpl/errors.hpp"
#include "fpl/parser.hpp"
#include "fpl/trajectory_io.hpp"
#include "testutil.hpp"

using namespace fpl;

namespace {

AtomCatalog small_catalog() {
  AtomCatalog c(2);
  for (const char *name : {"a", "b", "c", "d", "pi1", "pi2"})
    c.add(name, AtomRef(testutil::make_affine_atom(name, 2.0, {0.0, 0.0},
                                                   {1.0, 0.5}, {0.5, 0.5})));
  return c;
}

} // namespace

TEST_CASE("formula parsing: operators, precedence, associativity") {
  auto cat = small_catalog();

  auto u = parse_formula("pi1 U pi2", cat);
  CHECK(u->kind() == Formula::Kind::Until);
  CHECK(u->left()->is_leaf());
  CHECK(u->left()->leaf_ref().atom()->name() == "pi1");

  auto top_cat = parse_formula("TOP[2] . a", cat);
  CHECK(top_cat->kind() == Formula::Kind::Concat);
  CHECK(top_cat->left()->leaf_ref().is_top());
  CHECK(top_cat->left()->leaf_ref().top().horizon == 2.0);

  // | binds loosest, then U, then .
  auto f = parse_formula("a | b U c . d", cat);
  CHECK(f->kind() == Formula::Kind::Or);
  CHECK(f->right()->kind() == Formula::Kind::Until);
  CHECK(f->right()->right()->kind() == Formula::Kind::Concat);

  // U and . associate to the right, | to the left
  auto uu = parse_formula("a U b U c", cat);
  CHECK(uu->right()->kind() == Formula::Kind::Until);
  auto cc = parse_formula("a . b . c", cat);
  CHECK(cc->right()->kind() == Formula::Kind::Concat);
  auto oo = parse_formula("a | b | c", cat);
  CHECK(oo->left()->kind() == Formula::Kind::Or);

  auto parens = parse_formula("(a U b) . c", cat);
  CHECK(parens->kind() == Formula::Kind::Concat);
  CHECK_FALSE(is_lnf(parens));
}

TEST_CASE("F[t] is sugar for TOP[t] U ...") {
  auto cat = small_catalog();
  auto f = parse_formula("F[3] a", cat);
  CHECK(f->kind() == Formula::Kind::Until);
  CHECK(f->left()->leaf_ref().is_top());
  CHECK(f->left()->leaf_ref().top().horizon == 3.0);
  CHECK(f->left()->leaf_ref().top().dim == 2);

  // F binds to the next primary only
  auto g = parse_formula("F[3] a . b", cat);
  CHECK(g->kind() == Formula::Kind::Concat);
  CHECK(g->left()->kind() == Formula::Kind::Until);
}

TEST_CASE("until switch intervals parse and re-emit") {
  auto cat = small_catalog();
  auto f = parse_formula("a U_(50,57) b", cat);
  REQUIRE(f->until_interval().has_value());
  CHECK(f->until_interval()->lo == 50.0);
  CHECK(f->until_interval()->hi == 57.0);
  CHECK(emit_formula(f) == "a U_(50,57) b");
  CHECK_THROWS_AS(parse_formula("a U_(5,3) b", cat), ParseError);
}

TEST_CASE("parse errors carry position information") {
  auto cat = small_catalog();
  CHECK_THROWS_AS(parse_formula("a |", cat), ParseError);
  CHECK_THROWS_AS(parse_formula("a b", cat), ParseError);
  CHECK_THROWS_AS(parse_formula("(a | b", cat), ParseError);
  CHECK_THROWS_AS(parse_formula("unknown_atom", cat), ParseError);
  CHECK_THROWS_AS(parse_formula("TOP[-1]", cat), ParseError);
  CHECK_THROWS_AS(parse_formula("U a", cat), ParseError);
  CHECK_THROWS_AS(parse_formula("", cat), ParseError);
}

TEST_CASE("emission parenthesizes compound operands") {
  auto cat = small_catalog();
  auto f = parse_formula("(a . c) | (b . c)", cat);
  CHECK(emit_formula(f) == "(a . c) | (b . c)");
  auto g = parse_formula("a | b U c . d", cat);
  CHECK(emit_formula(g) == "a | (b U (c . d))");
  CHECK(emit_formula(parse_formula(emit_formula(g), cat)) ==
        emit_formula(g));
  auto top = parse_formula("TOP[2.5] . a", cat);
  CHECK(emit_formula(top) == "TOP[2.5] . a");
}

TEST_CASE("parse after emit reproduces random formulas node for node") {
  auto cat = small_catalog();
  std::vector<std::shared_ptr<const Atom>> atoms;
  for (const auto &[name, ref] : cat.entries())
    atoms.push_back(ref.atom());
  std::mt19937 rng(20240811);

  for (int i = 0; i < 200; ++i) {
    auto f = testutil::random_formula(rng, atoms, 4, 3);
    auto g = parse_formula(emit_formula(f), cat);
    CAPTURE(emit_formula(f));
    CHECK(testutil::same_formula(f, g));
  }
}

TEST_CASE("atom catalog JSON round-trips") {
  std::string text = R"({
    "dim": 2,
    "atoms": [
      {"name": "pi2", "horizon": 2,
       "mean": [[[0, 3], [2, 5]], [[0, 1], [2, 1]]],
       "cov": {"kind": "diagonal",
               "entries": [[[0, 0.0625], [2, 0.0625]],
                            [[0, 0.0625], [2, 0.0625]]]}},
      {"name": "loose", "horizon": 1,
       "mean": [[[0, 0], [1, 1]], [[0, 0], [1, 0]]],
       "cov": {"kind": "diagonal",
               "entries": [[[0, "inf"], [1, "inf"]],
                            [[0, 1], [1, 2]]]}},
      {"name": "anywhere", "horizon": 3, "top": true}
    ]
  })";
  auto cat = parse_atoms(text);
  CHECK(cat.dim() == 2);
  CHECK(cat.contains("pi2"));
  CHECK(cat.at("pi2").atom()->mean_at(1.0)(0) == doctest::Approx(4.0));
  CHECK(cat.at("loose").atom()->diagonal_variances_at(0.5)(0) ==
        std::numeric_limits<double>::infinity());
  CHECK(cat.at("anywhere").is_top());
  CHECK(cat.at("anywhere").horizon() == 3.0);

  auto emitted = emit_atoms(cat);
  auto cat2 = parse_atoms(emitted);
  CHECK(emit_atoms(cat2) == emitted);
  CHECK(cat2.at("pi2").atom()->mean_at(2.0)(0) == 5.0);
}

TEST_CASE("atom catalog JSON validation errors") {
  CHECK_THROWS_AS(parse_atoms("not json"), ParseError);
  CHECK_THROWS_AS(parse_atoms(R"({"atoms": []})"), ParseError);
  // duplicate names
  CHECK_THROWS_AS(parse_atoms(R"({"dim": 1, "atoms": [
    {"name": "a", "horizon": 1, "mean": [[[0,0],[1,0]]],
     "cov": {"kind": "diagonal", "entries": [[[0,1],[1,1]]]}},
    {"name": "a", "horizon": 1, "mean": [[[0,0],[1,0]]],
     "cov": {"kind": "diagonal", "entries": [[[0,1],[1,1]]]}}
  ]})"),
                  ParseError);
  // reserved name
  CHECK_THROWS_AS(parse_atoms(R"({"dim": 1, "atoms": [
    {"name": "TOP", "horizon": 1, "mean": [[[0,0],[1,0]]],
     "cov": {"kind": "diagonal", "entries": [[[0,1],[1,1]]]}}
  ]})"),
                  ParseError);
  // horizon not matching the component domains
  CHECK_THROWS_AS(parse_atoms(R"({"dim": 1, "atoms": [
    {"name": "a", "horizon": 2, "mean": [[[0,0],[1,0]]],
     "cov": {"kind": "diagonal", "entries": [[[0,1],[1,1]]]}}
  ]})"),
                  ParseError);
  // non-positive variance
  CHECK_THROWS_AS(parse_atoms(R"({"dim": 1, "atoms": [
    {"name": "a", "horizon": 1, "mean": [[[0,0],[1,0]]],
     "cov": {"kind": "diagonal", "entries": [[[0,1],[1,0]]]}}
  ]})"),
                  ParseError);
  // full covariance must be PD
  CHECK_THROWS_AS(parse_atoms(R"({"dim": 2, "atoms": [
    {"name": "a", "horizon": 1,
     "mean": [[[0,0],[1,0]], [[0,0],[1,0]]],
     "cov": {"kind": "full", "entries": [
       [[[0,1],[1,1]], [[0,2],[1,2]]],
       [[[0,2],[1,2]], [[0,1],[1,1]]]]}}
  ]})"),
                  ParseError);
}

TEST_CASE("trajectory CSV parses and round-trips") {
  std::string csv = "t,s1,s2\n0,0,-1\n1.5,1.5,-1\n5,5,-1\n";
  auto z = parse_trajectory(csv);
  CHECK(z.dim() == 2);
  CHECK(z.horizon() == 5.0);
  CHECK(z.eval(3.0)(0) == doctest::Approx(3.0));
  CHECK(emit_trajectory(z) == csv);

  auto point = parse_trajectory("t,s1,s2,s3\n0,0,1,2\n");
  CHECK(point.dim() == 3);
  CHECK(point.horizon() == 0.0);
}

TEST_CASE("trajectory CSV validation errors") {
  CHECK_THROWS_AS(parse_trajectory(""), ParseError);
  CHECK_THROWS_AS(parse_trajectory("x,s1\n0,1\n"), ParseError);
  CHECK_THROWS_AS(parse_trajectory("t,s1\n1,1\n2,2\n"), ParseError);
  CHECK_THROWS_AS(parse_trajectory("t,s1\n0,1\n0,2\n"), ParseError);
  CHECK_THROWS_AS(parse_trajectory("t,s1\n0,1\n1\n"), ParseError);
  CHECK_THROWS_AS(parse_trajectory("t,s1\n0,abc\n"), ParseError);
  CHECK_THROWS_AS(parse_trajectory("t,s1\n"), ParseError);
}
