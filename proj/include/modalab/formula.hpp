#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace modalab {

// Propositional modal formulas. Immutable trees with structural equality;
// copies share nodes, so passing by value is cheap.

enum class Conn : uint8_t {
  True,
  False,
  Atom,
  Not,
  Box,
  Diamond,
  And,
  Or,
  Implies,
  Iff,
};

bool is_unary(Conn c);
bool is_binary(Conn c);

class PropFormula {
 public:
  struct Node {
    Conn kind;
    std::string name;  // Atom only
    std::shared_ptr<const Node> lhs, rhs;
    size_t hash = 0;
  };

  PropFormula() : node_(truth().node_) {}

  static PropFormula atom(const std::string& name);
  static PropFormula truth();
  static PropFormula falsity();
  static PropFormula negation(PropFormula f);
  static PropFormula box(PropFormula f);
  static PropFormula diamond(PropFormula f);
  static PropFormula conj(PropFormula a, PropFormula b);
  static PropFormula disj(PropFormula a, PropFormula b);
  static PropFormula implies(PropFormula a, PropFormula b);
  static PropFormula iff(PropFormula a, PropFormula b);

  Conn kind() const { return node_->kind; }
  const std::string& atom_name() const;
  PropFormula lhs() const;  // unary operand or left operand
  PropFormula rhs() const;

  size_t hash() const { return node_->hash; }
  bool operator==(const PropFormula& o) const;
  bool operator!=(const PropFormula& o) const { return !(*this == o); }

  size_t node_count() const;

  const Node* raw() const { return node_.get(); }

 private:
  explicit PropFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Thrown by both parsers. offset is a byte offset into the input; expected
// lists the token spellings that would have been accepted there.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, size_t offset, std::vector<std::string> expected);
  size_t offset;
  std::vector<std::string> expected;
};

// Text grammar (lowest to highest precedence, "->" right-associative, the
// other binary connectives left-associative):
//   formula := iff
//   iff     := imp ("<->" imp)*
//   imp     := or ("->" imp)?
//   or      := and ("|" and)*
//   and     := unary ("&" unary)*
//   unary   := "~" unary | "[]" unary | "<>" unary
//            | "true" | "false" | atom | "(" formula ")"
// Atoms match [a-z][a-z0-9_]* and may not be "true" or "false".
PropFormula parse_prop(const std::string& text);

// Minimal parentheses; parse_prop(render(f)) == f.
std::string render(const PropFormula& f);

// Simultaneous substitution of formulas for atoms.
class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<std::string, PropFormula>> items);
  void set(const std::string& atom, PropFormula f);
  const PropFormula* find(const std::string& atom) const;
  // Composition: applying then(s2) is applying *this, then s2.
  Substitution then(const Substitution& s2) const;
  const std::unordered_map<std::string, PropFormula>& map() const { return map_; }

 private:
  std::unordered_map<std::string, PropFormula> map_;
};

PropFormula substitute(const PropFormula& f, const Substitution& s);

// All subformulas of f including f, deduplicated, children before parents.
std::vector<PropFormula> subformula_closure(const PropFormula& f);

// Atom names in first-occurrence (leftmost) order.
std::vector<std::string> atoms_of(const PropFormula& f);

}  // namespace modalab

template <>
struct std::hash<modalab::PropFormula> {
  size_t operator()(const modalab::PropFormula& f) const { return f.hash(); }
};
