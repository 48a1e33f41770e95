#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modalab/formula.hpp"
#include "modalab/kripke.hpp"

namespace modalab {

// Classification of a statement's modal behaviour over a model.
//
// A switch (relative to a reference world w) can always be toggled both ways:
// <>s and <>~s hold at every world reachable from w. A button is globally
// one-way: <>[]s holds at every world of the model, and once []s holds it
// persists along the relation. `pushed` lists the worlds where []s already
// holds. A statement can satisfy both tests; switches take priority and
// `also_button` records the overlap.
struct ControlReport {
  enum class Role : uint8_t { Switch, Button, Neither };
  Role role = Role::Neither;
  bool also_button = false;
  std::vector<std::string> pushed;  // Button (or also_button): worlds with []s
  std::string world;                // Neither: first violating world
  std::string reason;               // Neither: which test failed, and how
};

ControlReport classify(const Model& m, const std::string& w, const PropFormula& s);

// A dial family: statements d_0..d_{k-1} plus the scope worlds the dial
// contract is asserted on. Scope worlds must each satisfy exactly one d_i,
// and must reach (reflexive-transitive) a world satisfying d_i for every i.
// The reached witnesses may lie outside the scope.
struct DialFamily {
  std::vector<PropFormula> statements;
  std::vector<std::string> scope;
};

struct DialCheck {
  bool ok = true;
  std::string world;  // violating scope world
  size_t value = 0;   // dial index involved in the violation
  std::string reason;
};

DialCheck is_dial(const Model& m, const DialFamily& dial);

// Switches s_0..s_{k-1} are independent from w when every combination of
// settings is reachable from every world reachable from w: for all u in
// reach(w) and every pattern over the switches, some v in reach(u) realizes
// exactly that pattern.
struct SwitchIndependence {
  bool ok = true;
  std::string world;     // reachable world that cannot realize `pattern`
  uint64_t pattern = 0;  // bit i = required truth of ss[i]
  std::string detail;    // rendered unrealizable pattern
};

SwitchIndependence independent_switches(const Model& m, const std::string& w,
                                        const std::vector<PropFormula>& ss);

// Buttons b_0..b_{k-1} are independent of a dial when (i) some world has all
// of them unpushed, and (ii) from any scope world u, any single unpushed
// button can be pushed to any dial value while the other buttons unpushed at
// u stay unpushed.
struct ButtonDialIndependence {
  bool ok = true;
  std::string world;  // scope world where clause (ii) fails (or "" for (i))
  std::string detail;
};

ButtonDialIndependence independent_buttons_dial(const Model& m,
                                                const std::vector<PropFormula>& bs,
                                                const DialFamily& dial);

// Result of a capture construction: a substitution sigma mapping the atoms of
// the captured formula to control statements, and a world of the host model
// where the substituted instance is false. Instances are certified by
// model_check before being returned.
struct WitnessResult {
  Substitution substitution;
  std::string world;
  PropFormula instance;
};

// Transfers an S5 countermodel of f onto a host model through independent
// switches: sigma maps each atom of f to a disjunction of switch patterns,
// and the returned world falsifies the instance in the host.
// Preconditions: the switches are independent from w, f has an S5
// countermodel within the default cap, and 2^|ss| covers its cluster.
WitnessResult s5_cap_witness(const Model& m, const std::string& w,
                             const std::vector<PropFormula>& ss, const PropFormula& f);

// Transfers an S4.2 countermodel of f onto a host model through independent
// buttons and a dial. The countermodel is re-shaped onto a frame whose worlds
// are (button subset, dial value) pairs ordered by subset inclusion; sigma
// maps each atom to a disjunction of exact pushed-state/dial-value
// descriptions. Throws std::invalid_argument when the controls cannot realize
// any countermodel of f of that shape.
WitnessResult s42_cap_witness(const Model& m, const std::string& w,
                              const std::vector<PropFormula>& bs, const DialFamily& dial,
                              const PropFormula& f);

// Maximality probe: searches the pool (closed under the connectives up to
// `depth`, see formula_pool) for a g with <>[]g -> g false at w. Models whose
// w-reachable part is a final cluster pass for every pool.
struct MpReport {
  bool ok = true;
  std::optional<PropFormula> witness;  // g violating the implication
  std::string instance;                // rendered failing instance
};

MpReport mp_check(const Model& m, const std::string& w,
                  const std::vector<PropFormula>& pool, size_t depth);

// Synthetic host models.
//
// make_switch_model(n, depth): `depth` stacked levels, each a full cluster of
// all 2^n settings of atoms s0..s{n-1}; world (level, pattern) relates to
// every world of the same or a later level. Ids are "l{level}_p{pattern}".
//
// make_button_dial_model(nb, nd, depth): worlds are (level, pushed subset,
// dial value) triples, id "l{level}_b{subset}_d{value}"; (l,B,d) relates to
// (l',B',d') iff l <= l' and B is a subset of B'. Atom b_i holds where i is
// in the subset, d_j where the dial reads j.
Model make_switch_model(size_t n, size_t depth);
Model make_button_dial_model(size_t nb, size_t nd, size_t depth);

}  // namespace modalab
