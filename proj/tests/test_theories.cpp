#include "modalab/theories.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <unordered_set>

#include "doctest.h"
#include "gen.hpp"
#include "modalab/formula.hpp"
#include "modalab/kripke.hpp"

using namespace modalab;

namespace {

std::set<std::pair<std::string, std::string>> pairs_of(const Frame& fr) {
  auto v = fr.relation_pairs();
  return {v.begin(), v.end()};
}

Model chain2_model() {
  // w0 → w1 reflexive chain with p true only at the top.
  Frame fr({"w0", "w1"}, {{"w0", "w0"}, {"w0", "w1"}, {"w1", "w1"}});
  return Model(fr, {{"w0", {}}, {"w1", {"p"}}});
}

}  // namespace

TEST_CASE("theory names and frame classes") {
  CHECK(theory_name(Theory::K) == std::string("K"));
  CHECK(theory_name(Theory::S4) == std::string("S4"));
  CHECK(theory_name(Theory::S4_2) == std::string("S4.2"));
  CHECK(theory_name(Theory::S5) == std::string("S5"));
  for (Theory t : {Theory::K, Theory::S4, Theory::S4_2, Theory::S5}) {
    auto back = theory_from_string(theory_name(t));
    REQUIRE(back.has_value());
    CHECK(*back == t);
  }
  CHECK(theory_from_string("s4.2") == Theory::S4_2);
  CHECK(theory_from_string("k") == Theory::K);
  CHECK_FALSE(theory_from_string("s6").has_value());
  CHECK_FALSE(theory_from_string("").has_value());

  CHECK(theory_frame_class(Theory::K).empty());
  CHECK(theory_frame_class(Theory::S4) ==
        std::vector<FrameProperty>{FrameProperty::Reflexive, FrameProperty::Transitive});
  CHECK(theory_frame_class(Theory::S4_2) ==
        std::vector<FrameProperty>{FrameProperty::Reflexive, FrameProperty::Transitive,
                                   FrameProperty::Directed});
  CHECK(theory_frame_class(Theory::S5) ==
        std::vector<FrameProperty>{FrameProperty::Equivalence});
}

TEST_CASE("axiom scheme tables") {
  const auto& all = all_axiom_schemes();
  REQUIRE(all.size() == 6);
  std::vector<std::string> names;
  for (const auto& ax : all) names.push_back(ax.name);
  CHECK(names == std::vector<std::string>{"K", "Dual", "S", "4", ".2", "5"});
  CHECK(all[0].scheme == parse_prop("[](p->q) -> ([]p -> []q)"));
  CHECK(all[1].scheme == parse_prop("~<>p <-> []~p"));
  CHECK(all[2].scheme == parse_prop("[]p -> p"));
  CHECK(all[3].scheme == parse_prop("[]p -> [][]p"));
  CHECK(all[4].scheme == parse_prop("<>[]p -> []<>p"));
  CHECK(all[5].scheme == parse_prop("<>[]p -> p"));

  auto names_of = [](Theory t) {
    std::vector<std::string> out;
    for (const auto& ax : axioms(t)) out.push_back(ax.name);
    return out;
  };
  CHECK(names_of(Theory::K) == std::vector<std::string>{"K", "Dual"});
  CHECK(names_of(Theory::S4) == std::vector<std::string>{"K", "Dual", "S", "4"});
  CHECK(names_of(Theory::S4_2) == std::vector<std::string>{"K", "Dual", "S", "4", ".2"});
  CHECK(names_of(Theory::S5) == std::vector<std::string>{"K", "Dual", "S", "4", "5"});

  // Scheme renderings parse back to the same formula.
  for (const auto& ax : all) CHECK(parse_prop(render(ax.scheme)) == ax.scheme);
}

TEST_CASE("every theory validates its own axioms") {
  for (Theory t : {Theory::K, Theory::S4, Theory::S4_2, Theory::S5}) {
    for (const auto& ax : axioms(t)) {
      Verdict v = decide(ax.scheme, t, 8);
      INFO(theory_name(t), " axiom ", ax.name);
      CHECK(v.kind == Verdict::Kind::Valid);
    }
  }
}

TEST_CASE("distribution axiom is valid over all frames") {
  Verdict v = decide(parse_prop("[](p -> q) -> ([]p -> []q)"), Theory::S4, 16);
  CHECK(v.kind == Verdict::Kind::Valid);
  // Closure has 8 subformulas, so the search bound is 2^8.
  CHECK(v.searched_bound == 256);
  CHECK(decide(parse_prop("[](p -> q) -> ([]p -> []q)"), Theory::K, 16).kind ==
        Verdict::Kind::Valid);
}

TEST_CASE("directedness separates S4 from S4.2 on a three-world fork") {
  PropFormula f = parse_prop("<>[]p -> []<>p");
  Verdict v = decide(f, Theory::S4, 16);
  REQUIRE(v.kind == Verdict::Kind::Countermodel);
  REQUIRE(v.model.has_value());
  const Model& m = *v.model;
  REQUIRE(m.size() == 3);
  CHECK(pairs_of(m.frame()) ==
        std::set<std::pair<std::string, std::string>>{{"w0", "w0"},
                                                      {"w0", "w1"},
                                                      {"w0", "w2"},
                                                      {"w1", "w1"},
                                                      {"w2", "w2"}});
  CHECK(v.world == "w0");
  CHECK(m.atom_true(1, "p"));
  CHECK_FALSE(m.atom_true(0, "p"));
  CHECK_FALSE(m.atom_true(2, "p"));
  // The countermodel certifies itself.
  CHECK_FALSE(model_check(m, "w0", f));
  CHECK(frame_property(m.frame(), FrameProperty::Reflexive).holds);
  CHECK(frame_property(m.frame(), FrameProperty::Transitive).holds);
  CHECK_FALSE(frame_property(m.frame(), FrameProperty::Directed).holds);

  CHECK(decide(f, Theory::S4_2, 16).kind == Verdict::Kind::Valid);
}

TEST_CASE("the S5 collapse axiom fails in S4.2 on a two-world chain") {
  PropFormula f = parse_prop("<>[]p -> p");
  Verdict v = decide(f, Theory::S4_2, 16);
  REQUIRE(v.kind == Verdict::Kind::Countermodel);
  REQUIRE(v.model.has_value());
  const Model& m = *v.model;
  REQUIRE(m.size() == 2);
  CHECK(pairs_of(m.frame()) ==
        std::set<std::pair<std::string, std::string>>{{"w0", "w0"},
                                                      {"w0", "w1"},
                                                      {"w1", "w1"}});
  CHECK(v.world == "w0");
  CHECK_FALSE(m.atom_true(0, "p"));
  CHECK(m.atom_true(1, "p"));
  CHECK_FALSE(model_check(m, "w0", f));

  CHECK(decide(f, Theory::S5, 16).kind == Verdict::Kind::Valid);
}

TEST_CASE("reflexivity and transitivity separate K from S4") {
  Verdict vs = decide(parse_prop("[]p -> p"), Theory::K, 8);
  REQUIRE(vs.kind == Verdict::Kind::Countermodel);
  REQUIRE(vs.model.has_value());
  CHECK(vs.model->size() == 1);  // a single world without a loop
  CHECK(vs.model->frame().relation_pairs().empty());
  CHECK_FALSE(model_check(*vs.model, vs.world, parse_prop("[]p -> p")));
  CHECK(decide(parse_prop("[]p -> p"), Theory::S4, 8).kind == Verdict::Kind::Valid);

  Verdict v4 = decide(parse_prop("[]p -> [][]p"), Theory::K, 8);
  REQUIRE(v4.kind == Verdict::Kind::Countermodel);
  CHECK(v4.model->size() <= 3);
  CHECK_FALSE(model_check(*v4.model, v4.world, parse_prop("[]p -> [][]p")));
  CHECK(decide(parse_prop("[]p -> [][]p"), Theory::S4, 8).kind == Verdict::Kind::Valid);
}

TEST_CASE("decide argument handling") {
  PropFormula f = parse_prop("p -> p");
  CHECK_THROWS_AS(decide(f, Theory::K, 0), std::invalid_argument);

  // A satisfiable negation with the search capped below the countermodel size.
  Verdict v = decide(parse_prop("<>[]p -> p"), Theory::S4_2, 1);
  CHECK(v.kind == Verdict::Kind::Inconclusive);
  CHECK(v.cap == 1);

  // Closure larger than the decision guard.
  PropFormula deep = PropFormula::atom("p");
  for (int i = 0; i < 32; ++i) deep = PropFormula::box(deep);
  Verdict big = decide(deep, Theory::K, 4);
  CHECK(big.kind == Verdict::Kind::Inconclusive);

  // Too many independent atoms for the type procedure.
  PropFormula wide = PropFormula::atom("a0");
  for (int i = 1; i < 17; ++i) {
    wide = PropFormula::disj(wide, PropFormula::atom("a" + std::to_string(i)));
  }
  CHECK(decide(wide, Theory::S5, 4).kind == Verdict::Kind::Inconclusive);
}

TEST_CASE("satisfiability distinguishes the theories") {
  CHECK(theory_satisfiable(parse_prop("~(p -> p)"), Theory::K) == SatResult::Unsat);
  CHECK(theory_satisfiable(parse_prop("p & ~p"), Theory::S5) == SatResult::Unsat);
  CHECK(theory_satisfiable(parse_prop("<>p & []~p"), Theory::K) == SatResult::Unsat);
  CHECK(theory_satisfiable(parse_prop("<>p & []~p"), Theory::S4_2) == SatResult::Unsat);

  // Satisfiable without reflexivity, unsatisfiable with it.
  CHECK(theory_satisfiable(parse_prop("p & ~<>p"), Theory::K) == SatResult::Sat);
  CHECK(theory_satisfiable(parse_prop("p & ~<>p"), Theory::S4) == SatResult::Unsat);

  // Satisfiable on a chain, ruled out by symmetry.
  CHECK(theory_satisfiable(parse_prop("<>[]p & ~p"), Theory::S4) == SatResult::Sat);
  CHECK(theory_satisfiable(parse_prop("<>[]p & ~p"), Theory::S4_2) == SatResult::Sat);
  CHECK(theory_satisfiable(parse_prop("<>[]p & ~p"), Theory::S5) == SatResult::Unsat);

  // Needs a non-directed frame.
  PropFormula fork = parse_prop("<>[]p & <>[]~p");
  CHECK(theory_satisfiable(fork, Theory::S4) == SatResult::Sat);
  CHECK(theory_satisfiable(fork, Theory::S4_2) == SatResult::Unsat);
  CHECK(theory_satisfiable(fork, Theory::K) == SatResult::Sat);
}

TEST_CASE("bounded search outcomes") {
  // Valid formulas exhaust the cap.
  SearchOutcome ex = bounded_countermodel(parse_prop("[]p -> []p"), Theory::K, 3);
  CHECK(ex.status == SearchOutcome::Status::Exhausted);
  CHECK(ex.searched_to == 3);

  // Two atoms over K exceed the enumeration budget at five worlds.
  SearchOutcome budget = bounded_countermodel(parse_prop("[](p & q) -> []p"), Theory::K, 6);
  CHECK(budget.status == SearchOutcome::Status::BudgetExceeded);
  CHECK(budget.searched_to == 4);

  // S5 search uses one universal frame per size.
  SearchOutcome s5 = bounded_countermodel(parse_prop("<>p -> []p"), Theory::S5, 4);
  REQUIRE(s5.status == SearchOutcome::Status::Found);
  REQUIRE(s5.model.has_value());
  CHECK(s5.model->size() == 2);
  CHECK(s5.world == "w0");
  CHECK(s5.model->atom_true(0, "p"));
  CHECK_FALSE(s5.model->atom_true(1, "p"));
  CHECK(frame_property(s5.model->frame(), FrameProperty::Equivalence).holds);
}

TEST_CASE("formula pool enumeration is deterministic") {
  PropFormula p = PropFormula::atom("p");
  auto depth0 = formula_pool({p}, 0);
  REQUIRE(depth0.size() == 1);
  CHECK(depth0[0] == p);

  auto pool = formula_pool({p}, 1);
  std::vector<std::string> rendered;
  for (const auto& g : pool) rendered.push_back(render(g));
  CHECK(rendered == std::vector<std::string>{"p", "~p", "[]p", "<>p", "p & p", "p | p",
                                             "p -> p", "p <-> p"});

  // Seeds deduplicate structurally.
  auto deduped = formula_pool({p, PropFormula::atom("p")}, 0);
  CHECK(deduped.size() == 1);

  CHECK_THROWS_AS(formula_pool({p}, 2, 100), CapError);

  auto two = formula_pool({PropFormula::atom("a"), PropFormula::atom("b")}, 2);
  CHECK(two.size() == 2378);
  std::unordered_set<PropFormula> uniq(two.begin(), two.end());
  CHECK(uniq.size() == two.size());
  CHECK(std::find(two.begin(), two.end(), parse_prop("<>[]a")) != two.end());
  CHECK(std::find(two.begin(), two.end(), parse_prop("~(a & b)")) != two.end());
}

TEST_CASE("fingerprint of a single reflexive world validates every scheme") {
  Frame fr({"w"}, {{"w", "w"}});
  Model m(fr, {{"w", {"p"}}});
  FingerprintReport rep = logic_fingerprint(m, {PropFormula::atom("p")}, 1);
  CHECK(rep.pool_size == 8);
  REQUIRE(rep.schemes.size() == 6);
  for (const auto& s : rep.schemes) {
    INFO("scheme ", s.name);
    CHECK(s.all_valid());
    CHECK(s.failures.empty());
  }
  CHECK(rep.schemes[0].instances == 64);  // two metavariables
  CHECK(rep.schemes[2].instances == 8);
}

TEST_CASE("fingerprint of a reflexive chain rejects exactly the collapse scheme") {
  Model m = chain2_model();
  FingerprintReport rep = logic_fingerprint(m, {PropFormula::atom("p")}, 1);
  REQUIRE(rep.schemes.size() == 6);
  for (size_t i = 0; i < 5; ++i) {
    INFO("scheme ", rep.schemes[i].name);
    CHECK(rep.schemes[i].all_valid());
  }
  const SchemeReport& five = rep.schemes[5];
  CHECK(five.name == "5");
  CHECK_FALSE(five.all_valid());
  REQUIRE_FALSE(five.failures.empty());
  const SchemeFailure& first = five.failures[0];
  CHECK(first.args == std::vector<std::string>{"p"});
  CHECK(first.instance == "<>[]p -> p");
  CHECK(first.failing_worlds == std::vector<std::string>{"w0"});
  CHECK_FALSE(first.worlds_truncated);
}

TEST_CASE("fingerprint truncates long failure lists") {
  Frame fr({"a", "b"}, {});  // no edges: necessity is vacuous, reflexivity fails
  Model m(fr, {{"a", {"p"}}});
  FingerprintOptions opts;
  FingerprintReport rep = logic_fingerprint(m, {PropFormula::atom("p")}, 2, opts);
  const SchemeReport* s = nullptr;
  for (const auto& r : rep.schemes) {
    if (r.name == "S") s = &r;
  }
  REQUIRE(s != nullptr);
  CHECK_FALSE(s->all_valid());
  CHECK(s->failures.size() == opts.max_failures_per_scheme);
  CHECK(s->failures_truncated);
  CHECK(s->instances == rep.pool_size);
}

TEST_CASE("fingerprint handles models beyond the word-sized fast path") {
  // A 70-world irreflexive chain exercises the dynamic world-set path.
  std::vector<std::string> worlds;
  std::vector<std::pair<std::string, std::string>> rel;
  for (int i = 0; i < 70; ++i) worlds.push_back("c" + std::to_string(i));
  for (int i = 0; i + 1 < 70; ++i) rel.emplace_back(worlds[i], worlds[i + 1]);
  Frame fr(worlds, rel);
  Model m(fr, {{"c0", {"p"}}});
  FingerprintReport rep = logic_fingerprint(m, {PropFormula::atom("p")}, 1);
  CHECK(rep.schemes[0].all_valid());  // distribution holds on every frame
  CHECK(rep.schemes[1].all_valid());  // duality holds on every frame
  CHECK_FALSE(rep.schemes[2].all_valid());  // reflexivity fails on a strict chain
}

TEST_CASE("distribution and duality fingerprints hold on random models") {
  std::mt19937 rng(20260818);
  for (int trial = 0; trial < 25; ++trial) {
    size_t n = 1 + rng() % 4;
    std::vector<std::string> worlds;
    for (size_t i = 0; i < n; ++i) worlds.push_back("w" + std::to_string(i));
    std::vector<std::pair<std::string, std::string>> rel;
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        if (rng() % 2) rel.emplace_back(worlds[i], worlds[j]);
      }
    }
    std::map<std::string, std::vector<std::string>> val;
    for (const auto& w : worlds) {
      if (rng() % 2) val[w] = {"p"};
    }
    Model m(Frame(worlds, rel), val);
    FingerprintReport rep = logic_fingerprint(m, {PropFormula::atom("p")}, 1);
    CHECK(rep.schemes[0].all_valid());
    CHECK(rep.schemes[1].all_valid());
  }
}

TEST_CASE("verdicts nest along the theory chain") {
  std::mt19937 rng(97531);
  std::vector<PropFormula> corpus;
  for (int i = 0; i < 200; ++i) corpus.push_back(testgen::random_prop(rng, {"p", "q"}, 3));
  const Theory chain[] = {Theory::K, Theory::S4, Theory::S4_2, Theory::S5};
  for (const PropFormula& f : corpus) {
    Verdict prev = decide(f, chain[0], 6);
    for (int t = 1; t < 4; ++t) {
      Verdict cur = decide(f, chain[t], 6);
      INFO(render(f), " at ", theory_name(chain[t]));
      // Validity ascends: a formula valid over a larger frame class stays
      // valid over any subclass.
      if (prev.kind == Verdict::Kind::Valid) CHECK(cur.kind == Verdict::Kind::Valid);
      // Falsifiability descends: an equivalence-relation countermodel is a
      // directed preorder, which is a preorder.
      if (cur.kind == Verdict::Kind::Countermodel) {
        CHECK(prev.kind != Verdict::Kind::Valid);
      }
      prev = cur;
    }
  }
}

TEST_CASE("countermodels certify themselves and live in the right frame class") {
  std::mt19937 rng(246810);
  int found = 0;
  for (int i = 0; i < 150; ++i) {
    PropFormula f = testgen::random_prop(rng, {"p", "q"}, 3);
    for (Theory t : {Theory::K, Theory::S4, Theory::S4_2, Theory::S5}) {
      Verdict v = decide(f, t, 6);
      if (v.kind != Verdict::Kind::Countermodel) continue;
      ++found;
      REQUIRE(v.model.has_value());
      CHECK_FALSE(model_check(*v.model, v.world, f));
      for (FrameProperty prop : theory_frame_class(t)) {
        INFO(render(f), " on ", theory_name(t), ": ", frame_property_name(prop));
        CHECK(frame_property(v.model->frame(), prop).holds);
      }
    }
  }
  CHECK(found > 50);  // the corpus exercises the countermodel path heavily
}

TEST_CASE("decide agrees with the relabeling-pruned existence search") {
  std::mt19937 rng(1357911);
  for (int i = 0; i < 120; ++i) {
    PropFormula f = testgen::random_prop(rng, {"p", "q"}, 3);
    for (Theory t : {Theory::K, Theory::S4, Theory::S4_2, Theory::S5}) {
      size_t cap = t == Theory::K ? 4 : 5;
      Verdict v = decide(f, t, cap);
      INFO(render(f), " on ", theory_name(t));
      if (v.kind == Verdict::Kind::Valid) {
        CHECK_FALSE(exists_countermodel_upto(f, t, cap));
      } else if (v.kind == Verdict::Kind::Countermodel && v.model->size() <= cap) {
        CHECK(exists_countermodel_upto(f, t, v.model->size()));
      }
    }
  }
}

TEST_CASE("existence search caps are enforced") {
  PropFormula f = parse_prop("p");
  CHECK_THROWS_AS(exists_countermodel_upto(f, Theory::K, 5), CapError);
  CHECK_THROWS_AS(exists_countermodel_upto(f, Theory::S4, 6), CapError);
}
