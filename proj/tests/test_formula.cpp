#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "doctest.h"
#include "gen.hpp"
#include "modalab/fo_formula.hpp"
#include "modalab/formula.hpp"

using namespace modalab;

namespace {
PropFormula P(const std::string& s) { return parse_prop(s); }
const PropFormula p = PropFormula::atom("p");
const PropFormula q = PropFormula::atom("q");
const PropFormula r = PropFormula::atom("r");
}  // namespace

TEST_CASE("parse_prop: shapes of characteristic formulas") {
  PropFormula f = P("<>[]p -> []<>p");
  REQUIRE(f.kind() == Conn::Implies);
  CHECK(f.lhs() == PropFormula::diamond(PropFormula::box(p)));
  CHECK(f.rhs() == PropFormula::box(PropFormula::diamond(p)));

  CHECK(P("p") == p);

  CHECK(P("[](p -> q) -> ([]p -> []q)") ==
        PropFormula::implies(
            PropFormula::box(PropFormula::implies(p, q)),
            PropFormula::implies(PropFormula::box(p), PropFormula::box(q))));
}

TEST_CASE("parse_prop: precedence and associativity") {
  CHECK(P("p -> q -> r") == PropFormula::implies(p, PropFormula::implies(q, r)));
  CHECK(P("p <-> q <-> r") == PropFormula::iff(PropFormula::iff(p, q), r));
  CHECK(P("p & q | r") == PropFormula::disj(PropFormula::conj(p, q), r));
  CHECK(P("p | q & r") == PropFormula::disj(p, PropFormula::conj(q, r)));
  CHECK(P("~[]p & q") == PropFormula::conj(PropFormula::negation(PropFormula::box(p)), q));
  CHECK(P("p & q -> r") == PropFormula::implies(PropFormula::conj(p, q), r));
  CHECK(P("  <> [] p ") == PropFormula::diamond(PropFormula::box(p)));
}

TEST_CASE("parse_prop: lexical rules") {
  CHECK(P("s0_a1") == PropFormula::atom("s0_a1"));
  CHECK(P("true") == PropFormula::truth());
  CHECK(P("false") == PropFormula::falsity());
  // Reserved words only match whole tokens.
  CHECK(P("trueish") == PropFormula::atom("trueish"));
}

TEST_CASE("parse_prop: errors carry offset and expected set") {
  try {
    parse_prop("p &");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset == 3);
    CHECK(std::count(e.expected.begin(), e.expected.end(), "atom") == 1);
    CHECK(std::count(e.expected.begin(), e.expected.end(), "(") == 1);
    CHECK(std::is_sorted(e.expected.begin(), e.expected.end()));
  }
  try {
    parse_prop("(p");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset == 2);
    CHECK(std::count(e.expected.begin(), e.expected.end(), ")") == 1);
  }
  try {
    parse_prop("p q");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset == 2);
  }
  CHECK_THROWS_AS(parse_prop("p @ q"), ParseError);
  CHECK_THROWS_AS(parse_prop(""), ParseError);
  CHECK_THROWS_AS(parse_prop("Fred"), ParseError);
}

TEST_CASE("render: minimal parentheses") {
  CHECK(render(p) == "p");
  CHECK(render(PropFormula::diamond(PropFormula::box(p))) == "<>[]p");
  CHECK(render(PropFormula::conj(PropFormula::disj(p, q), r)) == "(p | q) & r");
  CHECK(render(P("p -> q -> r")) == "p -> q -> r");
  CHECK(render(PropFormula::implies(PropFormula::implies(p, q), r)) == "(p -> q) -> r");
  CHECK(render(PropFormula::disj(p, PropFormula::disj(q, r))) == "p | (q | r)");
  CHECK(render(PropFormula::negation(PropFormula::conj(p, q))) == "~(p & q)");
  CHECK(render(P("<>[]p -> []<>p")) == "<>[]p -> []<>p");
  CHECK(render(P("[](p -> q) -> ([]p -> []q)")) == "[](p -> q) -> []p -> []q");
}

TEST_CASE("round-trip: parse(render(f)) == f on random trees") {
  std::mt19937 rng(20240901);
  const std::vector<std::string> atoms = {"p", "q", "r", "s0"};
  for (int i = 0; i < 800; ++i) {
    PropFormula f = testgen::random_prop(rng, atoms, 6);
    PropFormula g = parse_prop(render(f));
    REQUIRE(g == f);
  }
}

TEST_CASE("substitute: examples") {
  Substitution s{{"p", P("s0 & ~s1")}};
  CHECK(substitute(P("<>[]p -> []<>p"), s) == P("<>[](s0 & ~s1) -> []<>(s0 & ~s1)"));

  Substitution ident{{"p", p}};
  CHECK(substitute(P("<>[]p -> []<>p"), ident) == P("<>[]p -> []<>p"));

  Substitution dq{{"p", PropFormula::diamond(q)}};
  CHECK(substitute(PropFormula::box(p), dq) == P("[]<>q"));
}

TEST_CASE("substitute: simultaneous, not sequential") {
  Substitution swap{{"p", q}, {"q", p}};
  CHECK(substitute(P("p & q"), swap) == P("q & p"));
  CHECK(substitute(P("p -> q"), swap) == P("q -> p"));
}

TEST_CASE("substitute: composition law") {
  std::mt19937 rng(7771);
  const std::vector<std::string> atoms = {"p", "q", "r"};
  for (int i = 0; i < 300; ++i) {
    PropFormula f = testgen::random_prop(rng, atoms, 5);
    Substitution s1{{"p", testgen::random_prop(rng, atoms, 3)},
                    {"q", testgen::random_prop(rng, atoms, 3)}};
    Substitution s2{{"q", testgen::random_prop(rng, atoms, 3)},
                    {"r", testgen::random_prop(rng, atoms, 3)}};
    REQUIRE(substitute(substitute(f, s1), s2) == substitute(f, s1.then(s2)));
  }
}

TEST_CASE("subformula_closure: counts, dedup, child-first order") {
  auto cl = subformula_closure(P("<>[]p -> []<>p"));
  CHECK(cl.size() == 6);
  CHECK(subformula_closure(p).size() == 1);
  CHECK(subformula_closure(P("p & p")).size() == 2);

  // Children precede parents, and the whole formula comes last.
  std::mt19937 rng(404);
  const std::vector<std::string> atoms = {"p", "q"};
  for (int i = 0; i < 200; ++i) {
    PropFormula f = testgen::random_prop(rng, atoms, 5);
    auto c = subformula_closure(f);
    REQUIRE(c.back() == f);
    REQUIRE(c.size() <= f.node_count());
    std::unordered_set<PropFormula> seen;
    for (const PropFormula& g : c) {
      if (is_unary(g.kind()) || is_binary(g.kind())) REQUIRE(seen.count(g.lhs()) == 1);
      if (is_binary(g.kind())) REQUIRE(seen.count(g.rhs()) == 1);
      REQUIRE(seen.insert(g).second);
    }
  }
}

TEST_CASE("atoms_of: first-occurrence order") {
  auto a = atoms_of(P("q & p & q -> r"));
  REQUIRE(a == std::vector<std::string>{"q", "p", "r"});
  CHECK(atoms_of(P("true -> false")).empty());
}

TEST_CASE("parse_fo: quantifiers, atoms, rename-apart") {
  FoFormula f = parse_fo("E x . A y . ~(y in x)");
  REQUIRE(f.kind() == FoKind::Exists);
  CHECK(f.var1() == "x");
  REQUIRE(f.lhs().kind() == FoKind::Forall);
  CHECK(f.lhs().lhs() == FoFormula::negation(FoFormula::mem("y", "x")));

  CHECK(parse_fo("x = y") == FoFormula::eq("x", "y"));
  CHECK(parse_fo("x in y & ~x = y") ==
        FoFormula::conj(FoFormula::mem("x", "y"),
                        FoFormula::negation(FoFormula::eq("x", "y"))));

  // Rebinding on one branch is rejected; rebinding on sibling branches is fine.
  CHECK_THROWS_AS(parse_fo("A x . E x . x in x"), ParseError);
  CHECK_THROWS_AS(parse_fo("A x . (x in x & E x . x = x)"), ParseError);
  CHECK_NOTHROW(parse_fo("(E x . x = x) & (E x . x in x)"));

  // "in" is reserved; quantified variable must be lowercase.
  CHECK_THROWS_AS(parse_fo("A in . in = in"), ParseError);
}

TEST_CASE("render_fo: minimal parentheses") {
  CHECK(render_fo(parse_fo("E x . A y . ~(y in x)")) == "E x . A y . ~y in x");
  CHECK(render_fo(parse_fo("A x . (x in y & x = y)")) == "A x . (x in y & x = y)");
  CHECK(render_fo(parse_fo("x = y <-> x in y")) == "x = y <-> x in y");
  CHECK(render_fo(parse_fo("<>E x . x in y")) == "<>E x . x in y");
}

TEST_CASE("fo round-trip on random trees") {
  std::mt19937 rng(555);
  for (int i = 0; i < 600; ++i) {
    FoFormula f = testgen::random_fo(rng, 5, /*allow_modal=*/true);
    REQUIRE(parse_fo(render_fo(f)) == f);
  }
}

TEST_CASE("free_vars: binding respected, first-occurrence order") {
  CHECK(free_vars(parse_fo("x in y & E z . z in x")) ==
        std::vector<std::string>{"x", "y"});
  CHECK(free_vars(parse_fo("E x . y in x")) == std::vector<std::string>{"y"});
  CHECK(free_vars(parse_fo("A x . E y . x in y")).empty());
}

TEST_CASE("potentialist_translate: quantifier wrapping") {
  CHECK(render_fo(potentialist_translate(parse_fo("E x . A y . ~(y in x)"))) ==
        "<>E x . []A y . ~y in x");
  CHECK(render_fo(potentialist_translate(parse_fo("A x . E y . x in y"))) ==
        "[]A x . <>E y . x in y");

  // Identity on quantifier-free formulas.
  FoFormula open_atom = parse_fo("x in y");
  CHECK(potentialist_translate(open_atom) == open_atom);
  FoFormula qf = parse_fo("x in y & ~x = y");
  CHECK(potentialist_translate(qf) == qf);

  // Modal input is rejected.
  CHECK_THROWS_AS(potentialist_translate(parse_fo("<>x in y")), std::invalid_argument);
  CHECK(is_first_order(parse_fo("A x . x in x")));
  CHECK_FALSE(is_first_order(parse_fo("A x . []x in x")));
}

TEST_CASE("fo translate idempotence on quantifier-free random trees") {
  std::mt19937 rng(9090);
  std::function<FoFormula(int)> gen = [&](int d) -> FoFormula {
    if (d <= 0) {
      switch (rng() % 4) {
        case 0: return FoFormula::truth();
        case 1: return FoFormula::falsity();
        case 2: return FoFormula::mem("x", "y");
        default: return FoFormula::eq("x", "y");
      }
    }
    switch (rng() % 5) {
      case 0: return FoFormula::negation(gen(d - 1));
      case 1: return FoFormula::conj(gen(d - 1), gen(d - 1));
      case 2: return FoFormula::disj(gen(d - 1), gen(d - 1));
      case 3: return FoFormula::implies(gen(d - 1), gen(d - 1));
      default: return FoFormula::iff(gen(d - 1), gen(d - 1));
    }
  };
  for (int i = 0; i < 200; ++i) {
    FoFormula f = gen(4);
    REQUIRE(potentialist_translate(f) == f);
  }
}
