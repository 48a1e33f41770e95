#pragma once

// Seeded random formula generators shared by the property tests. Determinism
// matters: every test fixes its own seed so failures replay exactly.

#include <random>
#include <string>
#include <vector>

#include "modalab/fo_formula.hpp"
#include "modalab/formula.hpp"

namespace testgen {

inline modalab::PropFormula random_prop(std::mt19937& rng,
                                        const std::vector<std::string>& atoms,
                                        int depth) {
  using modalab::PropFormula;
  std::uniform_int_distribution<int> leaf(0, static_cast<int>(atoms.size()) + 1);
  if (depth <= 0) {
    int k = leaf(rng);
    if (k == 0) return PropFormula::truth();
    if (k == 1) return PropFormula::falsity();
    return PropFormula::atom(atoms[static_cast<size_t>(k - 2)]);
  }
  std::uniform_int_distribution<int> pick(0, 8);
  switch (pick(rng)) {
    case 0: return PropFormula::negation(random_prop(rng, atoms, depth - 1));
    case 1: return PropFormula::box(random_prop(rng, atoms, depth - 1));
    case 2: return PropFormula::diamond(random_prop(rng, atoms, depth - 1));
    case 3:
      return PropFormula::conj(random_prop(rng, atoms, depth - 1),
                               random_prop(rng, atoms, depth - 1));
    case 4:
      return PropFormula::disj(random_prop(rng, atoms, depth - 1),
                               random_prop(rng, atoms, depth - 1));
    case 5:
      return PropFormula::implies(random_prop(rng, atoms, depth - 1),
                                  random_prop(rng, atoms, depth - 1));
    case 6:
      return PropFormula::iff(random_prop(rng, atoms, depth - 1),
                              random_prop(rng, atoms, depth - 1));
    default: return random_prop(rng, atoms, 0);
  }
}

// Generates rename-apart trees: each quantifier introduces a fresh variable,
// atoms draw from the variables in scope (plus free parameters x, y).
inline modalab::FoFormula random_fo(std::mt19937& rng, std::vector<std::string>& scope,
                                    int& fresh, int depth, bool allow_modal) {
  using modalab::FoFormula;
  auto var = [&]() -> std::string {
    std::uniform_int_distribution<size_t> d(0, scope.size() - 1);
    return scope[d(rng)];
  };
  if (depth <= 0) {
    std::uniform_int_distribution<int> leaf(0, 3);
    switch (leaf(rng)) {
      case 0: return FoFormula::truth();
      case 1: return FoFormula::falsity();
      case 2: return FoFormula::mem(var(), var());
      default: return FoFormula::eq(var(), var());
    }
  }
  std::uniform_int_distribution<int> pick(0, allow_modal ? 10 : 8);
  switch (pick(rng)) {
    case 0: return FoFormula::negation(random_fo(rng, scope, fresh, depth - 1, allow_modal));
    case 1:
      return FoFormula::conj(random_fo(rng, scope, fresh, depth - 1, allow_modal),
                             random_fo(rng, scope, fresh, depth - 1, allow_modal));
    case 2:
      return FoFormula::disj(random_fo(rng, scope, fresh, depth - 1, allow_modal),
                             random_fo(rng, scope, fresh, depth - 1, allow_modal));
    case 3:
      return FoFormula::implies(random_fo(rng, scope, fresh, depth - 1, allow_modal),
                                random_fo(rng, scope, fresh, depth - 1, allow_modal));
    case 4:
      return FoFormula::iff(random_fo(rng, scope, fresh, depth - 1, allow_modal),
                            random_fo(rng, scope, fresh, depth - 1, allow_modal));
    case 5:
    case 6: {
      std::string v = "z" + std::to_string(fresh++);
      scope.push_back(v);
      FoFormula body = random_fo(rng, scope, fresh, depth - 1, allow_modal);
      scope.pop_back();
      return pick(rng) % 2 ? FoFormula::forall(v, body) : FoFormula::exists(v, body);
    }
    case 7:
    case 8: return random_fo(rng, scope, fresh, 0, allow_modal);
    case 9: return FoFormula::box(random_fo(rng, scope, fresh, depth - 1, allow_modal));
    default:
      return FoFormula::diamond(random_fo(rng, scope, fresh, depth - 1, allow_modal));
  }
}

inline modalab::FoFormula random_fo(std::mt19937& rng, int depth, bool allow_modal) {
  std::vector<std::string> scope = {"x", "y"};
  int fresh = 0;
  return random_fo(rng, scope, fresh, depth, allow_modal);
}

}  // namespace testgen
