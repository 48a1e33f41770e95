#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modalab/fo_formula.hpp"
#include "modalab/hf.hpp"
#include "modalab/kripke.hpp"

namespace modalab {

// One stage of the toy set-theoretic multiverse: a finite transitive set of
// hereditarily finite sets. The height is the least ordinal missing from the
// domain; it is recomputed from the domain, never declared.
struct ToyWorld {
  std::string id;
  std::vector<HfSet> domain;  // canonically sorted, duplicate-free
  size_t height = 0;
};

// A finite family of toy worlds ordered by domain inclusion. Accessibility
// is computed from the domains, so the frame is a preorder by construction;
// what can fail is the existence of a top world whose domain contains every
// other. Construction normalizes each domain (sorts, deduplicates), rejects
// non-transitive domains and duplicate ids, and recomputes heights.
class ToySystem {
 public:
  ToySystem() = default;
  explicit ToySystem(std::vector<ToyWorld> worlds);

  size_t size() const { return worlds_.size(); }
  const std::vector<ToyWorld>& worlds() const { return worlds_; }
  const ToyWorld& world(size_t i) const { return worlds_.at(i); }
  size_t index_of(const std::string& id) const;  // throws on unknown id
  bool has_world(const std::string& id) const;

  // Domain inclusion, hence reflexive and transitive.
  bool accessible(size_t i, size_t j) const;

  bool has_top() const { return top_.has_value(); }
  size_t top() const;  // throws std::invalid_argument when no top exists

  // Union of all domains, canonically sorted.
  const std::vector<HfSet>& union_domain() const { return union_; }

 private:
  std::vector<ToyWorld> worlds_;
  std::vector<HfSet> union_;
  std::optional<size_t> top_;
  std::map<std::string, size_t> index_;
};

// Builds the truncated-multiples system: one world T(S,h) for every subset S
// of the multipliers and every height h from the least height at which every
// truncated set fits (never below 7) up to max_height. T(S,h)'s domain holds
// the ordinals below h plus {m*k : k < K} for each m in S. Worlds are ordered
// subset-major (bitmask over the sorted multipliers ascending) with heights
// ascending inside a subset, so the last world is the top.
ToySystem make_toy_system(size_t max_height, const std::vector<size_t>& multipliers, size_t K);

// Tarskian truth of a first-order membership formula in one world, with env
// binding every free variable to a domain element. Throws
// std::invalid_argument on modal operators, unbound free variables, or
// parameters outside the domain.
bool eval_fo(const ToyWorld& w, const FoFormula& f, const std::map<std::string, HfSet>& env);

// Modal truth over the inclusion frame: quantifiers range over the current
// world's domain, box/diamond over inclusion-extensions (reflexive). Same
// parameter preconditions as eval_fo, minus the first-order restriction.
bool eval_potentialist(const ToySystem& sys, size_t w, const FoFormula& f,
                       const std::map<std::string, HfSet>& env);

struct CorollaryViolation {
  size_t sentence = 0;  // index into the corpus
  std::string world;
  std::string env;  // rendered parameter tuple, empty for closed sentences
};

struct CorollaryReport {
  bool ok = true;
  size_t sentences = 0;
  size_t checks = 0;  // (sentence, world, tuple) triples compared
  std::vector<CorollaryViolation> violations;
};

// Mirroring sweep: for every corpus formula, every world, and every
// parameter tuple from that world's domain, truth at the top world must
// equal potentialist truth of the translation at the world. Requires
// first-order input and a top world; free variables are capped at 3.
CorollaryReport corollary_check(const ToySystem& sys, const std::vector<FoFormula>& corpus);

// True when the system is a directed preorder with a top world and every set
// in the union of domains appears in some extension of every world.
bool account_check(const ToySystem& sys);

// Observable used to induce a propositional model from a system: a closed
// first-order sentence, a height-residue test, or membership of a truncated
// multiple-set in the domain.
class AtomSpec {
 public:
  static AtomSpec sentence(FoFormula f);           // closed, first-order
  static AtomSpec height_mod(size_t m, size_t i);  // height % m == i
  static AtomSpec button(size_t m, size_t count);  // multiples(m,count) in domain

  bool holds_at(const ToyWorld& w) const;

 private:
  AtomSpec() = default;
  enum class Kind : uint8_t { Sentence, HeightMod, Button };
  Kind kind_ = Kind::Sentence;
  FoFormula sentence_;
  size_t m_ = 0, arg_ = 0;
};

// Text forms: "height_mod <m> = <i>", "button <m> <K>", or any closed
// sentence in the first-order grammar. Anything else is an unknown
// observable.
AtomSpec parse_atom_spec(const std::string& text);

// Propositional model on the system's worlds (declared order) and inclusion
// relation, one atom per named observable.
Model induce_model(const ToySystem& sys, const std::map<std::string, AtomSpec>& atoms);

// Closed first-order sentence asserting that {m*k : k < K} is in the domain:
// an element whose members are pinned extensionally all the way down. Truth
// is rigid across inclusion-extensions, so the sentence behaves as a button.
FoFormula button_sentence(size_t m, size_t K);

// System JSON:
//   {"worlds": [{"id": ..., "height": ..., "domain": [<nested arrays>...]},
//    ...], "top": <id>}
// Sets serialize as nested arrays of their elements in canonical order.
// Unknown keys are rejected; heights are cross-checked against the domains;
// "top" (when present) must name the computed top world.
std::string system_to_json(const ToySystem& sys);
ToySystem system_from_json(const std::string& text);

}  // namespace modalab
