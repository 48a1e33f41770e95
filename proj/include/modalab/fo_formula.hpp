#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "modalab/formula.hpp"  // ParseError

namespace modalab {

// First-order modal formulas over membership and equality. Variables are
// [a-z][a-z0-9_]* (except the reserved words); free variables act as
// parameter slots. Formulas are kept in rename-apart normal form: the parser
// rejects a quantifier that rebinds a variable already bound on its branch.

enum class FoKind : uint8_t {
  True,
  False,
  Mem,  // v1 in v2
  Eq,   // v1 = v2
  Not,
  Box,
  Diamond,
  And,
  Or,
  Implies,
  Iff,
  Forall,  // A v1 . lhs
  Exists,  // E v1 . lhs
};

class FoFormula {
 public:
  struct Node {
    FoKind kind;
    std::string v1, v2;
    std::shared_ptr<const Node> lhs, rhs;
  };

  FoFormula() : node_(truth().node_) {}

  static FoFormula truth();
  static FoFormula falsity();
  static FoFormula mem(const std::string& x, const std::string& y);
  static FoFormula eq(const std::string& x, const std::string& y);
  static FoFormula negation(FoFormula f);
  static FoFormula box(FoFormula f);
  static FoFormula diamond(FoFormula f);
  static FoFormula conj(FoFormula a, FoFormula b);
  static FoFormula disj(FoFormula a, FoFormula b);
  static FoFormula implies(FoFormula a, FoFormula b);
  static FoFormula iff(FoFormula a, FoFormula b);
  static FoFormula forall(const std::string& v, FoFormula body);
  static FoFormula exists(const std::string& v, FoFormula body);

  FoKind kind() const { return node_->kind; }
  const std::string& var1() const { return node_->v1; }
  const std::string& var2() const { return node_->v2; }
  FoFormula lhs() const;
  FoFormula rhs() const;
  const Node* raw() const { return node_.get(); }

  bool operator==(const FoFormula& o) const;
  bool operator!=(const FoFormula& o) const { return !(*this == o); }

 private:
  explicit FoFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Grammar extends the propositional one: atoms are "x in y" and "x = y",
// and "A x ." / "E x ." are prefix quantifiers at unary precedence.
FoFormula parse_fo(const std::string& text);

std::string render_fo(const FoFormula& f);

// True if f contains no Box/Diamond node.
bool is_first_order(const FoFormula& f);

// Free variables in first-occurrence order.
std::vector<std::string> free_vars(const FoFormula& f);

// The potentialist translation: every "E x ." becomes "<>E x ." and every
// "A x ." becomes "[]A x .". Requires a purely first-order input; acts as
// the identity on quantifier-free formulas.
FoFormula potentialist_translate(const FoFormula& f);

}  // namespace modalab
