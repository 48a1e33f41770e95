#include "modalab/fo_formula.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_set>

namespace modalab {

namespace {

std::shared_ptr<const FoFormula::Node> mk(FoKind kind, std::string v1, std::string v2,
                                          std::shared_ptr<const FoFormula::Node> a,
                                          std::shared_ptr<const FoFormula::Node> b) {
  auto n = std::make_shared<FoFormula::Node>();
  n->kind = kind;
  n->v1 = std::move(v1);
  n->v2 = std::move(v2);
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

bool node_eq(const FoFormula::Node* x, const FoFormula::Node* y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind || x->v1 != y->v1 || x->v2 != y->v2) return false;
  return node_eq(x->lhs.get(), y->lhs.get()) && node_eq(x->rhs.get(), y->rhs.get());
}

}  // namespace

FoFormula FoFormula::truth() {
  static const FoFormula t{mk(FoKind::True, "", "", nullptr, nullptr)};
  return t;
}
FoFormula FoFormula::falsity() {
  static const FoFormula f{mk(FoKind::False, "", "", nullptr, nullptr)};
  return f;
}
FoFormula FoFormula::mem(const std::string& x, const std::string& y) {
  return FoFormula(mk(FoKind::Mem, x, y, nullptr, nullptr));
}
FoFormula FoFormula::eq(const std::string& x, const std::string& y) {
  return FoFormula(mk(FoKind::Eq, x, y, nullptr, nullptr));
}
FoFormula FoFormula::negation(FoFormula f) {
  return FoFormula(mk(FoKind::Not, "", "", f.node_, nullptr));
}
FoFormula FoFormula::box(FoFormula f) {
  return FoFormula(mk(FoKind::Box, "", "", f.node_, nullptr));
}
FoFormula FoFormula::diamond(FoFormula f) {
  return FoFormula(mk(FoKind::Diamond, "", "", f.node_, nullptr));
}
FoFormula FoFormula::conj(FoFormula a, FoFormula b) {
  return FoFormula(mk(FoKind::And, "", "", a.node_, b.node_));
}
FoFormula FoFormula::disj(FoFormula a, FoFormula b) {
  return FoFormula(mk(FoKind::Or, "", "", a.node_, b.node_));
}
FoFormula FoFormula::implies(FoFormula a, FoFormula b) {
  return FoFormula(mk(FoKind::Implies, "", "", a.node_, b.node_));
}
FoFormula FoFormula::iff(FoFormula a, FoFormula b) {
  return FoFormula(mk(FoKind::Iff, "", "", a.node_, b.node_));
}
FoFormula FoFormula::forall(const std::string& v, FoFormula body) {
  return FoFormula(mk(FoKind::Forall, v, "", body.node_, nullptr));
}
FoFormula FoFormula::exists(const std::string& v, FoFormula body) {
  return FoFormula(mk(FoKind::Exists, v, "", body.node_, nullptr));
}

FoFormula FoFormula::lhs() const {
  if (!node_->lhs) throw std::logic_error("lhs: leaf formula");
  return FoFormula(node_->lhs);
}
FoFormula FoFormula::rhs() const {
  if (!node_->rhs) throw std::logic_error("rhs: not a binary formula");
  return FoFormula(node_->rhs);
}

bool FoFormula::operator==(const FoFormula& o) const {
  return node_eq(node_.get(), o.node_.get());
}

namespace {

struct Token {
  enum Kind {
    LParen,
    RParen,
    Not,
    Box,
    Diamond,
    And,
    Or,
    Implies,
    Iff,
    TrueK,
    FalseK,
    ForallK,  // 'A'
    ExistsK,  // 'E'
    Dot,
    InK,
    EqK,
    Var,
    End,
  } kind;
  std::string text;
  size_t offset;
};

bool var_start(char c) { return c >= 'a' && c <= 'z'; }
bool var_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }
  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\n' || text_[pos_] == '\r')) {
      ++pos_;
    }
    tok_.offset = pos_;
    if (pos_ >= text_.size()) {
      tok_ = {Token::End, "", pos_};
      return;
    }
    char c = text_[pos_];
    auto two = [&](char a, char b) {
      return c == a && pos_ + 1 < text_.size() && text_[pos_ + 1] == b;
    };
    if (c == '(') { tok_ = {Token::LParen, "(", pos_}; pos_ += 1; return; }
    if (c == ')') { tok_ = {Token::RParen, ")", pos_}; pos_ += 1; return; }
    if (c == '~') { tok_ = {Token::Not, "~", pos_}; pos_ += 1; return; }
    if (c == '.') { tok_ = {Token::Dot, ".", pos_}; pos_ += 1; return; }
    if (two('[', ']')) { tok_ = {Token::Box, "[]", pos_}; pos_ += 2; return; }
    if (two('<', '>')) { tok_ = {Token::Diamond, "<>", pos_}; pos_ += 2; return; }
    if (c == '&') { tok_ = {Token::And, "&", pos_}; pos_ += 1; return; }
    if (c == '|') { tok_ = {Token::Or, "|", pos_}; pos_ += 1; return; }
    if (two('-', '>')) { tok_ = {Token::Implies, "->", pos_}; pos_ += 2; return; }
    if (c == '<' && pos_ + 2 < text_.size() && text_[pos_ + 1] == '-' &&
        text_[pos_ + 2] == '>') {
      tok_ = {Token::Iff, "<->", pos_};
      pos_ += 3;
      return;
    }
    if (c == '=') { tok_ = {Token::EqK, "=", pos_}; pos_ += 1; return; }
    if (c == 'A' || c == 'E') {
      tok_ = {c == 'A' ? Token::ForallK : Token::ExistsK, std::string(1, c), pos_};
      pos_ += 1;
      return;
    }
    if (var_start(c)) {
      size_t start = pos_;
      while (pos_ < text_.size() && var_char(text_[pos_])) ++pos_;
      std::string word = text_.substr(start, pos_ - start);
      if (word == "true") { tok_ = {Token::TrueK, word, start}; return; }
      if (word == "false") { tok_ = {Token::FalseK, word, start}; return; }
      if (word == "in") { tok_ = {Token::InK, word, start}; return; }
      tok_ = {Token::Var, word, start};
      return;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "' at offset " +
                         std::to_string(pos_),
                     pos_, {});
  }

  const std::string& text_;
  size_t pos_ = 0;
  Token tok_;
};

[[noreturn]] void fail(const Token& got, std::vector<std::string> expected) {
  std::sort(expected.begin(), expected.end());
  std::ostringstream os;
  os << "syntax error at offset " << got.offset << ": unexpected "
     << (got.kind == Token::End ? "end of input" : "'" + got.text + "'") << ", expected ";
  for (size_t i = 0; i < expected.size(); ++i) {
    if (i) os << ", ";
    os << expected[i];
  }
  throw ParseError(os.str(), got.offset, std::move(expected));
}

class FoParser {
 public:
  explicit FoParser(const std::string& text) : lex_(text) {}

  FoFormula parse() {
    FoFormula f = formula();
    if (lex_.peek().kind != Token::End) {
      fail(lex_.peek(), {"&", "|", "->", "<->", "end of input"});
    }
    return f;
  }

 private:
  FoFormula formula() { return iff(); }

  FoFormula iff() {
    FoFormula f = imp();
    while (lex_.peek().kind == Token::Iff) {
      lex_.take();
      f = FoFormula::iff(f, imp());
    }
    return f;
  }

  FoFormula imp() {
    FoFormula f = disj();
    if (lex_.peek().kind == Token::Implies) {
      lex_.take();
      return FoFormula::implies(f, imp());
    }
    return f;
  }

  FoFormula disj() {
    FoFormula f = conj();
    while (lex_.peek().kind == Token::Or) {
      lex_.take();
      f = FoFormula::disj(f, conj());
    }
    return f;
  }

  FoFormula conj() {
    FoFormula f = unary();
    while (lex_.peek().kind == Token::And) {
      lex_.take();
      f = FoFormula::conj(f, unary());
    }
    return f;
  }

  FoFormula unary() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Token::Not:
        lex_.take();
        return FoFormula::negation(unary());
      case Token::Box:
        lex_.take();
        return FoFormula::box(unary());
      case Token::Diamond:
        lex_.take();
        return FoFormula::diamond(unary());
      case Token::ForallK:
      case Token::ExistsK: {
        Token q = lex_.take();
        Token v = expect(Token::Var, {"variable"});
        if (bound_.count(v.text)) {
          throw ParseError("variable '" + v.text + "' rebound at offset " +
                               std::to_string(v.offset),
                           v.offset, {});
        }
        expect(Token::Dot, {"."});
        bound_.insert(v.text);
        FoFormula body = unary();
        bound_.erase(v.text);
        return q.kind == Token::ForallK ? FoFormula::forall(v.text, body)
                                        : FoFormula::exists(v.text, body);
      }
      case Token::TrueK:
        lex_.take();
        return FoFormula::truth();
      case Token::FalseK:
        lex_.take();
        return FoFormula::falsity();
      case Token::Var: {
        Token x = lex_.take();
        const Token& op = lex_.peek();
        if (op.kind == Token::InK) {
          lex_.take();
          Token y = expect(Token::Var, {"variable"});
          return FoFormula::mem(x.text, y.text);
        }
        if (op.kind == Token::EqK) {
          lex_.take();
          Token y = expect(Token::Var, {"variable"});
          return FoFormula::eq(x.text, y.text);
        }
        fail(op, {"in", "="});
      }
      case Token::LParen: {
        lex_.take();
        FoFormula f = formula();
        if (lex_.peek().kind != Token::RParen) {
          fail(lex_.peek(), {")", "&", "|", "->", "<->"});
        }
        lex_.take();
        return f;
      }
      default:
        fail(t, {"~", "[]", "<>", "A", "E", "true", "false", "variable", "("});
    }
  }

  Token expect(Token::Kind k, std::vector<std::string> names) {
    if (lex_.peek().kind != k) fail(lex_.peek(), std::move(names));
    return lex_.take();
  }

  Lexer lex_;
  std::unordered_set<std::string> bound_;
};

int prec(FoKind c) {
  switch (c) {
    case FoKind::Iff: return 1;
    case FoKind::Implies: return 2;
    case FoKind::Or: return 3;
    case FoKind::And: return 4;
    case FoKind::Not:
    case FoKind::Box:
    case FoKind::Diamond:
    case FoKind::Forall:
    case FoKind::Exists: return 5;
    default: return 6;
  }
}

void render_into(const FoFormula& f, std::string& out, bool parenthesize) {
  if (parenthesize) out += '(';
  switch (f.kind()) {
    case FoKind::True: out += "true"; break;
    case FoKind::False: out += "false"; break;
    case FoKind::Mem: out += f.var1() + " in " + f.var2(); break;
    case FoKind::Eq: out += f.var1() + " = " + f.var2(); break;
    case FoKind::Not:
    case FoKind::Box:
    case FoKind::Diamond: {
      out += f.kind() == FoKind::Not ? "~" : (f.kind() == FoKind::Box ? "[]" : "<>");
      FoFormula c = f.lhs();
      render_into(c, out, prec(c.kind()) < 5);
      break;
    }
    case FoKind::Forall:
    case FoKind::Exists: {
      out += f.kind() == FoKind::Forall ? "A " : "E ";
      out += f.var1();
      out += " . ";
      FoFormula c = f.lhs();
      render_into(c, out, prec(c.kind()) < 5);
      break;
    }
    default: {
      const char* op = f.kind() == FoKind::And       ? "&"
                       : f.kind() == FoKind::Or      ? "|"
                       : f.kind() == FoKind::Implies ? "->"
                                                     : "<->";
      int p = prec(f.kind());
      bool right_assoc = f.kind() == FoKind::Implies;
      FoFormula a = f.lhs(), b = f.rhs();
      int pa = prec(a.kind()), pb = prec(b.kind());
      render_into(a, out, right_assoc ? pa <= p : pa < p);
      out += ' ';
      out += op;
      out += ' ';
      render_into(b, out, right_assoc ? pb < p : pb <= p);
      break;
    }
  }
  if (parenthesize) out += ')';
}

}  // namespace

FoFormula parse_fo(const std::string& text) { return FoParser(text).parse(); }

std::string render_fo(const FoFormula& f) {
  std::string out;
  render_into(f, out, false);
  return out;
}

bool is_first_order(const FoFormula& f) {
  if (f.kind() == FoKind::Box || f.kind() == FoKind::Diamond) return false;
  if (f.raw()->lhs && !is_first_order(f.lhs())) return false;
  if (f.raw()->rhs && !is_first_order(f.rhs())) return false;
  return true;
}

std::vector<std::string> free_vars(const FoFormula& f) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::unordered_set<std::string> bound;
  std::function<void(const FoFormula&)> walk = [&](const FoFormula& g) {
    switch (g.kind()) {
      case FoKind::Mem:
      case FoKind::Eq:
        for (const std::string& v : {g.var1(), g.var2()}) {
          if (!bound.count(v) && seen.insert(v).second) out.push_back(v);
        }
        return;
      case FoKind::Forall:
      case FoKind::Exists:
        bound.insert(g.var1());
        walk(g.lhs());
        bound.erase(g.var1());
        return;
      default:
        if (g.raw()->lhs) walk(g.lhs());
        if (g.raw()->rhs) walk(g.rhs());
        return;
    }
  };
  walk(f);
  return out;
}

namespace {

FoFormula translate_rec(const FoFormula& f) {
  switch (f.kind()) {
    case FoKind::True:
    case FoKind::False:
    case FoKind::Mem:
    case FoKind::Eq:
      return f;
    case FoKind::Not:
      return FoFormula::negation(translate_rec(f.lhs()));
    case FoKind::And:
      return FoFormula::conj(translate_rec(f.lhs()), translate_rec(f.rhs()));
    case FoKind::Or:
      return FoFormula::disj(translate_rec(f.lhs()), translate_rec(f.rhs()));
    case FoKind::Implies:
      return FoFormula::implies(translate_rec(f.lhs()), translate_rec(f.rhs()));
    case FoKind::Iff:
      return FoFormula::iff(translate_rec(f.lhs()), translate_rec(f.rhs()));
    case FoKind::Forall:
      return FoFormula::box(FoFormula::forall(f.var1(), translate_rec(f.lhs())));
    case FoKind::Exists:
      return FoFormula::diamond(FoFormula::exists(f.var1(), translate_rec(f.lhs())));
    default:
      throw std::invalid_argument("potentialist_translate: input must be first-order");
  }
}

}  // namespace

FoFormula potentialist_translate(const FoFormula& f) {
  if (!is_first_order(f)) {
    throw std::invalid_argument("potentialist_translate: input must be first-order");
  }
  return translate_rec(f);
}

}  // namespace modalab
