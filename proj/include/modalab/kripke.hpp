#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "modalab/formula.hpp"

namespace modalab {

// Raised when an operation would exceed its configured search cap.
class CapError : public std::runtime_error {
 public:
  explicit CapError(const std::string& msg) : std::runtime_error(msg) {}
};

// Fixed-width dynamic bitset over world indices. Models can exceed 64 worlds
// (the synthetic button/dial models do), so truth sets use this instead of
// uint64_t; the compiled fast path below covers the ≤64-world case.
class WorldSet {
 public:
  WorldSet() = default;
  explicit WorldSet(size_t n) : n_(n), bits_((n + 63) / 64, 0) {}

  size_t size() const { return n_; }
  bool test(size_t i) const { return (bits_[i >> 6] >> (i & 63)) & 1; }
  void set(size_t i) { bits_[i >> 6] |= uint64_t{1} << (i & 63); }
  void reset(size_t i) { bits_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }

  size_t count() const;
  bool none() const;
  bool any() const { return !none(); }
  bool all() const { return count() == n_; }

  bool subset_of(const WorldSet& o) const;
  bool intersects(const WorldSet& o) const;

  WorldSet& operator&=(const WorldSet& o);
  WorldSet& operator|=(const WorldSet& o);
  WorldSet complement() const;  // within [0, n)

  bool operator==(const WorldSet& o) const { return n_ == o.n_ && bits_ == o.bits_; }
  bool operator!=(const WorldSet& o) const { return !(*this == o); }

  // First set bit at index ≥ from, or size() if none.
  size_t next(size_t from = 0) const;

 private:
  size_t n_ = 0;
  std::vector<uint64_t> bits_;
};

enum class FrameProperty : uint8_t { Reflexive, Transitive, Directed, Symmetric, Equivalence };

const char* frame_property_name(FrameProperty p);

// Finite frame: an ordered list of world ids and a raw accessibility relation.
// No closure is ever applied implicitly; rt_closure is the explicit helper.
class Frame {
 public:
  Frame(std::vector<std::string> worlds,
        const std::vector<std::pair<std::string, std::string>>& relation);

  size_t size() const { return worlds_.size(); }
  const std::vector<std::string>& worlds() const { return worlds_; }
  const std::string& world_name(size_t i) const { return worlds_[i]; }
  size_t index_of(const std::string& id) const;  // throws on unknown id
  bool has_world(const std::string& id) const;

  bool related(size_t i, size_t j) const { return succ_[i].test(j); }
  const WorldSet& successors(size_t i) const { return succ_[i]; }

  // Relation as id pairs in (source index, target index) order.
  std::vector<std::pair<std::string, std::string>> relation_pairs() const;

  Frame rt_closure() const;

  // Worlds reachable from w by the reflexive-transitive closure (w included).
  WorldSet reachable_from(size_t w) const;

 private:
  Frame() = default;
  std::vector<std::string> worlds_;
  std::vector<WorldSet> succ_;
  std::unordered_map<std::string, size_t> index_;
  friend Frame frame_from_mask(size_t n, uint64_t relation_mask);
  friend Frame frame_from_successors(std::vector<std::string> worlds,
                                     std::vector<WorldSet> succ);
};

// Builds a frame directly from per-world successor sets (succ[i] sized to the
// world count). Avoids materializing the relation as id pairs, which matters
// for the dense synthetic host models.
Frame frame_from_successors(std::vector<std::string> worlds, std::vector<WorldSet> succ);

// Frames on ≤8 worlds pack into a uint64 relation mask, bit (i,j) = i*n + j.
// Enumeration and countermodel search iterate masks in ascending order.
Frame frame_from_mask(size_t n, uint64_t relation_mask);
uint64_t mask_of_frame(const Frame& fr);  // requires size ≤ 8

// Property predicates on packed relation masks (n ≤ 8).
bool mask_reflexive(uint64_t m, size_t n);
bool mask_transitive(uint64_t m, size_t n);
bool mask_symmetric(uint64_t m, size_t n);
bool mask_directed(uint64_t m, size_t n);

class Model {
 public:
  Model(Frame fr, const std::map<std::string, std::vector<std::string>>& valuation);

  const Frame& frame() const { return frame_; }
  size_t size() const { return frame_.size(); }

  bool atom_true(size_t world, const std::string& atom) const;
  // Worlds where the atom holds (all-false set for unknown atoms).
  WorldSet atom_set(const std::string& atom) const;
  // Atom names mentioned by the valuation, sorted.
  std::vector<std::string> atom_names() const;
  // Atoms true at one world, sorted.
  std::vector<std::string> atoms_at(size_t world) const;

 private:
  Frame frame_;
  std::map<std::string, WorldSet> val_;
};

// Valuation mask convention: bit (w*|atoms| + a) makes atoms[a] true at world
// w. Countermodel search iterates these masks in ascending order.
Model model_from_mask(const Frame& fr, const std::vector<std::string>& atoms,
                      uint64_t val_mask);

struct PropertyCheck {
  bool holds = true;
  std::vector<std::string> witness;  // violating worlds, empty when holds
  std::string detail;                // human-readable violation
};

// Universal frame properties with a concrete first (index-lexicographic)
// counterexample tuple on failure.
PropertyCheck frame_property(const Frame& fr, FrameProperty p);

// Truth set of f in m (Kripke forcing, raw successors).
WorldSet truth_set(const Model& m, const PropFormula& f);

bool model_check(const Model& m, const std::string& world, const PropFormula& f);

struct ModelValidity {
  bool valid = true;
  std::string failing_world;  // first world (declared order) where f fails
};
ModelValidity valid_on_model(const Model& m, const PropFormula& f);

struct FrameValidity {
  bool valid = true;
  // On failure: the first counterexample in deterministic order (valuation
  // masks ascending, then worlds in declared order).
  std::map<std::string, std::vector<std::string>> valuation;
  std::string failing_world;
};
// Exhaustive sweep over all 2^(|worlds|·|atoms|) valuations of f's atoms.
FrameValidity valid_on_frame(const Frame& fr, const PropFormula& f, size_t atom_cap = 4);

// Yields every frame on worlds {w0..w(n-1)} satisfying all props, exactly
// once, in ascending relation-mask order. Stops early if yield returns false.
void enumerate_frames(size_t n, const std::vector<FrameProperty>& props,
                      const std::function<bool(const Frame&)>& yield, size_t cap = 5);
size_t count_frames(size_t n, const std::vector<FrameProperty>& props, size_t cap = 5);

// Bit-exact model JSON:
//   {"worlds": [...], "relation": [["w0","w1"],...], "valuation": {"w0": [...]}}
// Unknown keys rejected. Optional "close": "rt" applies reflexive-transitive
// closure at load. Worlds missing from "valuation" get the empty atom set.
Model model_from_json(const std::string& text);
std::string model_to_json(const Model& m);

// Compiled formula over ≤64-world frames: a postfix program evaluated on
// uint64 world masks. succ[w] is world w's successor mask; atoms[a] is the
// truth mask of the a-th atom (in the compiled atom order).
class CompiledFormula {
 public:
  CompiledFormula(const PropFormula& f, const std::vector<std::string>& atom_order);
  uint64_t eval(const uint64_t* succ, size_t n, const uint64_t* atoms) const;
  size_t atom_count() const { return natoms_; }

 private:
  enum class Op : uint8_t { True, False, Atom, Not, And, Or, Implies, Iff, Box, Diamond };
  struct Ins {
    Op op;
    uint32_t arg = 0;
  };
  std::vector<Ins> prog_;
  size_t natoms_ = 0;
  size_t max_stack_ = 0;
};

}  // namespace modalab
