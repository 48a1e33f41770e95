#pragma once

#include <optional>
#include <string>
#include <vector>

#include "modalab/formula.hpp"
#include "modalab/kripke.hpp"

namespace modalab {

enum class Theory : uint8_t { K, S4, S4_2, S5 };

const char* theory_name(Theory t);  // "K", "S4", "S4.2", "S5"
std::optional<Theory> theory_from_string(const std::string& s);

// Frame class the theory is decided over: K ↦ all frames, S4 ↦ preorders,
// S4.2 ↦ directed preorders, S5 ↦ equivalence relations.
std::vector<FrameProperty> theory_frame_class(Theory t);

// Axiom schemes over the metavariables p and q; instantiate with substitute.
struct AxiomScheme {
  std::string name;  // "K", "Dual", "S", "4", ".2", "5"
  PropFormula scheme;
};
std::vector<AxiomScheme> axioms(Theory t);
// The six schemes in fixed order: K, Dual, S, 4, .2, 5.
const std::vector<AxiomScheme>& all_axiom_schemes();

struct Verdict {
  enum class Kind : uint8_t { Valid, Countermodel, Inconclusive };
  Kind kind = Kind::Inconclusive;
  size_t searched_bound = 0;   // Valid: the filtration bound 2^|closure|
  std::optional<Model> model;  // Countermodel (self-certifying)
  std::string world;           // Countermodel: first failing world
  size_t cap = 0;              // Inconclusive
};

// Decision over the theory's frame class. Validity is established by a
// complete satisfiability check of ¬f (type elimination up to the filtration
// bound); countermodels come from the deterministic bounded search below, so
// the returned model is the first in (size, relation mask, valuation mask)
// order. Inconclusive reports resource exhaustion, never an error.
Verdict decide(const PropFormula& f, Theory t, size_t cap = 12);

enum class SatResult : uint8_t { Sat, Unsat, Unknown };
// Is g true at some world of some model over the theory's frame class?
// Complete filtration-style check; Unknown only past the size guards.
SatResult theory_satisfiable(const PropFormula& g, Theory t);

struct SearchOutcome {
  enum class Status : uint8_t { Found, Exhausted, BudgetExceeded };
  Status status = Status::Exhausted;
  std::optional<Model> model;
  std::string world;
  size_t searched_to = 0;  // largest model size fully enumerated
};
// Brute-force countermodel search over the frame class: model size ascending,
// relation bitmask ascending (diagonal forced for reflexive classes), then
// valuation bitmask ascending; reports the first failing world. For S5 the
// search ranges over single universal clusters, which is complete.
SearchOutcome bounded_countermodel(const PropFormula& f, Theory t, size_t max_worlds);

// Existence-only countermodel check, pruned to one frame per relabeling
// class. Independent of both the satisfiability routine and the deterministic
// extraction order, so it can referee them. Caps: 4 worlds for K, 5 for the
// preorder classes; throws CapError beyond them.
bool exists_countermodel_upto(const PropFormula& f, Theory t, size_t max_worlds);

// Closure of the seeds under ~, [], <> and the binary connectives, applied
// `depth` times; structural dedup; deterministic order (seeds first, then
// unary images, then binary images, level by level).
std::vector<PropFormula> formula_pool(const std::vector<PropFormula>& seeds, size_t depth,
                                      size_t max_pool = 4096);

struct SchemeFailure {
  std::vector<std::string> args;  // rendered images for p (and q)
  std::string instance;           // rendered substitution instance
  std::vector<std::string> failing_worlds;
  bool worlds_truncated = false;
};

struct SchemeReport {
  std::string name;
  std::string scheme;
  size_t instances = 0;
  size_t valid = 0;
  std::vector<SchemeFailure> failures;
  bool failures_truncated = false;
  bool all_valid() const { return valid == instances; }
};

struct FingerprintReport {
  size_t pool_size = 0;
  std::vector<SchemeReport> schemes;  // K, Dual, S, 4, .2, 5
};

struct FingerprintOptions {
  size_t max_pool = 4096;
  size_t max_instances = 20'000'000;
  size_t max_failures_per_scheme = 10;
  size_t max_worlds_per_failure = 8;
};

// Instantiates every scheme of S4 ∪ S4.2 ∪ S5 with all pool formulas built
// from the seeds up to `depth` and validates each instance on m.
FingerprintReport logic_fingerprint(const Model& m, const std::vector<PropFormula>& seeds,
                                    size_t depth, const FingerprintOptions& opts = {});

}  // namespace modalab
