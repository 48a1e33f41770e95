#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "gen.hpp"
#include "modalab/kripke.hpp"

using namespace modalab;

namespace {

PropFormula P(const std::string& s) { return parse_prop(s); }

Frame fork_frame() {
  return Frame({"r", "a", "b"},
               {{"r", "r"}, {"a", "a"}, {"b", "b"}, {"r", "a"}, {"r", "b"}});
}

Frame chain2() {
  return Frame({"w0", "w1"}, {{"w0", "w0"}, {"w0", "w1"}, {"w1", "w1"}});
}

Frame chain3_rt() {
  return Frame({"w0", "w1", "w2"}, {{"w0", "w1"}, {"w1", "w2"}}).rt_closure();
}

Model chain2_p_at_top() {
  return Model(chain2(), {{"w0", {}}, {"w1", {"p"}}});
}

}  // namespace

TEST_CASE("frame_property: examples") {
  Frame one({"w"}, {{"w", "w"}});
  CHECK(frame_property(one, FrameProperty::Reflexive).holds);
  CHECK(frame_property(one, FrameProperty::Transitive).holds);
  CHECK(frame_property(one, FrameProperty::Directed).holds);

  PropertyCheck d = frame_property(fork_frame(), FrameProperty::Directed);
  REQUIRE_FALSE(d.holds);
  CHECK(d.witness == std::vector<std::string>{"r", "a", "b"});

  CHECK(frame_property(chain3_rt(), FrameProperty::Directed).holds);
}

TEST_CASE("frame_property: witnesses for each property") {
  Frame irr({"u", "v"}, {{"u", "v"}});
  PropertyCheck r = frame_property(irr, FrameProperty::Reflexive);
  REQUIRE_FALSE(r.holds);
  CHECK(r.witness == std::vector<std::string>{"u"});

  Frame nt({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
  PropertyCheck t = frame_property(nt, FrameProperty::Transitive);
  REQUIRE_FALSE(t.holds);
  CHECK(t.witness == std::vector<std::string>{"a", "b", "c"});

  PropertyCheck s = frame_property(irr, FrameProperty::Symmetric);
  REQUIRE_FALSE(s.holds);
  CHECK(s.witness == std::vector<std::string>{"u", "v"});

  CHECK(frame_property(chain2(), FrameProperty::Equivalence).holds == false);
  Frame cluster({"x", "y"}, {{"x", "x"}, {"x", "y"}, {"y", "x"}, {"y", "y"}});
  CHECK(frame_property(cluster, FrameProperty::Equivalence).holds);
}

TEST_CASE("rt_closure and reachability") {
  Frame c = Frame({"w0", "w1"}, {{"w0", "w1"}}).rt_closure();
  CHECK(c.related(0, 0));
  CHECK(c.related(0, 1));
  CHECK(c.related(1, 1));
  CHECK_FALSE(c.related(1, 0));
  CHECK(mask_of_frame(c.rt_closure()) == mask_of_frame(c));

  Frame f = fork_frame();
  CHECK(f.reachable_from(0).count() == 3);
  CHECK(f.reachable_from(1).count() == 1);
  // Reachability includes the start world even without a loop.
  Frame bare({"u", "v"}, {{"u", "v"}});
  CHECK(bare.reachable_from(1).count() == 1);
  CHECK(bare.reachable_from(1).test(1));
}

TEST_CASE("model_check: forcing on the chain model") {
  Model m = chain2_p_at_top();
  CHECK(model_check(m, "w0", P("<>p")));
  CHECK_FALSE(model_check(m, "w0", P("[]p")));
  CHECK(model_check(m, "w0", P("<>[]p")));
  CHECK(model_check(m, "w1", P("[]p")));
  CHECK_THROWS_AS(model_check(m, "nope", P("p")), std::invalid_argument);
}

TEST_CASE("valid_on_model") {
  Model m = chain2_p_at_top();
  CHECK(valid_on_model(m, P("p | ~p")).valid);

  ModelValidity v = valid_on_model(m, P("[]p"));
  REQUIRE_FALSE(v.valid);
  CHECK(v.failing_world == "w0");

  Model single(Frame({"w"}, {{"w", "w"}}), {{"w", {"p"}}});
  CHECK(valid_on_model(single, P("<>[]p -> p")).valid);
}

TEST_CASE("valid_on_frame: fork counterexample is deterministic") {
  FrameValidity v = valid_on_frame(fork_frame(), P("<>[]p -> []<>p"));
  REQUIRE_FALSE(v.valid);
  CHECK(v.failing_world == "r");
  CHECK(v.valuation.at("r").empty());
  CHECK(v.valuation.at("a") == std::vector<std::string>{"p"});
  CHECK(v.valuation.at("b").empty());

  CHECK(valid_on_frame(fork_frame(), P("p -> p")).valid);
  CHECK(valid_on_frame(chain3_rt(), P("<>[]p -> []<>p")).valid);
}

TEST_CASE("valid_on_frame: atom cap") {
  CHECK_THROWS_AS(valid_on_frame(chain2(), P("a1 & a2 & a3 & a4 & a5")), CapError);
  // 0-atom formulas sweep the single empty valuation.
  CHECK(valid_on_frame(chain2(), P("true -> true")).valid);
  FrameValidity v = valid_on_frame(chain2(), P("[]false"));
  REQUIRE_FALSE(v.valid);
  CHECK(v.failing_world == "w0");
}

TEST_CASE("enumerate_frames: counts and order") {
  CHECK(count_frames(1, {FrameProperty::Reflexive}) == 1);
  CHECK(count_frames(2, {FrameProperty::Reflexive, FrameProperty::Transitive}) == 4);
  CHECK(count_frames(2, {}) == 16);

  // Labeled preorders (reflexive+transitive) on 1..4 worlds.
  std::vector<size_t> preorders;
  for (size_t n = 1; n <= 4; ++n) {
    preorders.push_back(count_frames(n, {FrameProperty::Reflexive, FrameProperty::Transitive}));
  }
  CHECK(preorders == std::vector<size_t>{1, 4, 29, 355});

  // Equivalence relations on 1..4 worlds are the Bell numbers.
  std::vector<size_t> eqs;
  for (size_t n = 1; n <= 4; ++n) {
    eqs.push_back(count_frames(n, {FrameProperty::Equivalence}));
  }
  CHECK(eqs == std::vector<size_t>{1, 2, 5, 15});

  uint64_t prev_mask = 0;
  bool first = true;
  size_t seen = 0;
  enumerate_frames(2, {}, [&](const Frame& fr) {
    uint64_t m = mask_of_frame(fr);
    if (!first) CHECK(m > prev_mask);
    first = false;
    prev_mask = m;
    ++seen;
    return true;
  });
  CHECK(seen == 16);

  CHECK_THROWS_AS(enumerate_frames(6, {}, [](const Frame&) { return true; }), CapError);
}

TEST_CASE("kripke invariant sweeps on small preorders") {
  // (4)-soundness, box persistence, and duality over all preorders on ≤3 worlds.
  PropFormula box_p = P("[]p");
  PropFormula four = P("[]p -> [][]p");
  std::mt19937 rng(1234);
  const std::vector<std::string> atoms = {"p", "q"};
  for (size_t n = 1; n <= 3; ++n) {
    enumerate_frames(n, {FrameProperty::Reflexive, FrameProperty::Transitive},
                     [&](const Frame& fr) {
                       CHECK(valid_on_frame(fr, four).valid);
                       for (uint64_t vm = 0; vm < (uint64_t{1} << (2 * n)); ++vm) {
                         Model m = model_from_mask(fr, atoms, vm);
                         WorldSet ts = truth_set(m, box_p);
                         for (size_t w = 0; w < n; ++w) {
                           if (!ts.test(w)) continue;
                           for (size_t u = 0; u < n; ++u) {
                             if (fr.related(w, u)) CHECK(ts.test(u));
                           }
                         }
                       }
                       return true;
                     });
  }
  // Duality on random frames and formulas.
  for (int trial = 0; trial < 100; ++trial) {
    size_t n = 1 + rng() % 4;
    uint64_t rel = rng() & ((uint64_t{1} << (n * n)) - 1);
    Frame fr = frame_from_mask(n, rel);
    Model m = model_from_mask(fr, atoms, rng() & ((uint64_t{1} << (2 * n)) - 1));
    PropFormula f = testgen::random_prop(rng, atoms, 4);
    PropFormula dia = PropFormula::diamond(f);
    PropFormula box_not = PropFormula::box(PropFormula::negation(f));
    for (size_t w = 0; w < n; ++w) {
      const std::string& id = fr.world_name(w);
      REQUIRE(model_check(m, id, dia) == !model_check(m, id, box_not));
    }
  }
}

TEST_CASE("correspondence: directed <-> validates (.2) on preorders up to 4 worlds") {
  PropFormula g2 = P("<>[]p -> []<>p");
  for (size_t n = 1; n <= 4; ++n) {
    enumerate_frames(n, {FrameProperty::Reflexive, FrameProperty::Transitive},
                     [&](const Frame& fr) {
                       bool directed = frame_property(fr, FrameProperty::Directed).holds;
                       bool validates = valid_on_frame(fr, g2).valid;
                       REQUIRE(directed == validates);
                       return true;
                     });
  }
}

TEST_CASE("model JSON: load, save, validate") {
  const std::string text = R"({"worlds": ["w0","w1"],
    "relation": [["w0","w0"],["w0","w1"],["w1","w1"]],
    "valuation": {"w0": [], "w1": ["p"]}})";
  Model m = model_from_json(text);
  CHECK(m.size() == 2);
  CHECK(m.frame().related(0, 1));
  CHECK_FALSE(m.frame().related(1, 0));
  CHECK(m.atom_true(1, "p"));
  CHECK_FALSE(m.atom_true(0, "p"));

  // Round-trip through the canonical serialization.
  Model m2 = model_from_json(model_to_json(m));
  CHECK(model_to_json(m2) == model_to_json(m));

  CHECK_THROWS_AS(model_from_json(R"({"worlds": ["w"], "extra": 1})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(model_from_json(R"({"worlds": ["w","w"]})"), std::invalid_argument);
  CHECK_THROWS_AS(model_from_json(R"({"worlds": ["w"], "relation": [["w","x"]]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(model_from_json(R"({"worlds": ["w"], "valuation": {"x": []}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(model_from_json(R"({"worlds": ["w"], "valuation": {"w": ["True"]}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(model_from_json("not json"), std::invalid_argument);
  CHECK_THROWS_AS(model_from_json(R"({"worlds": ["w"], "close": "sym"})"),
                  std::invalid_argument);

  // Missing valuation = empty; "close": "rt" closes the relation.
  Model closed = model_from_json(R"({"worlds": ["a","b"], "relation": [["a","b"]],
                                     "close": "rt"})");
  CHECK(closed.frame().related(0, 0));
  CHECK(closed.frame().related(1, 1));
  CHECK(closed.frame().related(0, 1));
  CHECK(closed.atom_names().empty());
}

TEST_CASE("compiled evaluator agrees with truth_set") {
  std::mt19937 rng(777);
  const std::vector<std::string> atoms = {"p", "q"};
  for (int trial = 0; trial < 300; ++trial) {
    size_t n = 1 + rng() % 6;
    uint64_t rel = rng() & ((uint64_t{1} << (n * n)) - 1);
    Frame fr = frame_from_mask(n, rel);
    uint64_t vm = rng() & ((uint64_t{1} << (2 * n)) - 1);
    Model m = model_from_mask(fr, atoms, vm);
    PropFormula f = testgen::random_prop(rng, atoms, 5);

    CompiledFormula cf(f, atoms);
    std::vector<uint64_t> succ(n, 0);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        if (fr.related(i, j)) succ[i] |= uint64_t{1} << j;
      }
    }
    uint64_t av[2] = {0, 0};
    for (size_t w = 0; w < n; ++w) {
      for (size_t a = 0; a < 2; ++a) {
        if ((vm >> (w * 2 + a)) & 1) av[a] |= uint64_t{1} << w;
      }
    }
    uint64_t fast = cf.eval(succ.data(), n, av);
    WorldSet slow = truth_set(m, f);
    for (size_t w = 0; w < n; ++w) {
      REQUIRE(((fast >> w) & 1) == (slow.test(w) ? 1 : 0));
    }
  }
}
