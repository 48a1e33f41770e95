#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace modalab {

// Canonical interned hereditarily finite sets. Every distinct set has exactly
// one live node, so extensional equality is pointer equality and no
// comparison recurses into equal subtrees. Elements are kept sorted in the
// canonical order (rank first, then lexicographically on the element lists),
// which fixes iteration order, printing, and serialization. Nodes are never
// reclaimed; the intern table is process-global and thread-safe.
class HfSet {
 public:
  struct Node;

  HfSet();  // the empty set

  static HfSet empty();
  // Interns the set with exactly these elements (sorted and deduplicated).
  static HfSet from_children(const std::vector<HfSet>& children);
  // Von Neumann ordinal: n = {0, 1, ..., n-1}.
  static HfSet ordinal(size_t n);
  // Truncated multiples {m*k : k < count} as a set of ordinals.
  static HfSet multiples(size_t m, size_t count);

  // 0 for the empty set, otherwise 1 + the largest element rank.
  size_t rank() const;
  size_t size() const;             // number of elements
  HfSet element(size_t i) const;   // i-th element in canonical order
  std::vector<HfSet> elements() const;
  bool contains(const HfSet& x) const;

  bool is_ordinal() const;
  size_t ordinal_value() const;    // requires is_ordinal()

  // Ordinals print as decimals, everything else as {a,b,...} over the
  // canonical element order; the empty set is the ordinal 0.
  std::string pretty() const;

  // Stable identity usable as a hash/memo key.
  const Node* raw() const { return node_; }

  bool operator==(const HfSet& o) const { return node_ == o.node_; }
  bool operator!=(const HfSet& o) const { return node_ != o.node_; }
  bool operator<(const HfSet& o) const;   // canonical order
  bool operator<=(const HfSet& o) const { return *this == o || *this < o; }

 private:
  explicit HfSet(const Node* n) : node_(n) {}
  const Node* node_;
};

}  // namespace modalab
