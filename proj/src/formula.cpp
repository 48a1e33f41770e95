#include "modalab/formula.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace modalab {

namespace {

size_t mix(size_t seed, size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

size_t node_hash(Conn kind, const std::string& name, const PropFormula::Node* a,
                 const PropFormula::Node* b) {
  size_t h = mix(0x51ed2701, static_cast<size_t>(kind));
  h = mix(h, std::hash<std::string>{}(name));
  if (a) h = mix(h, a->hash);
  if (b) h = mix(h, b->hash);
  return h;
}

std::shared_ptr<const PropFormula::Node> make_node(Conn kind, std::string name,
                                                   std::shared_ptr<const PropFormula::Node> a,
                                                   std::shared_ptr<const PropFormula::Node> b) {
  auto n = std::make_shared<PropFormula::Node>();
  n->kind = kind;
  n->name = std::move(name);
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  n->hash = node_hash(kind, n->name, n->lhs.get(), n->rhs.get());
  return n;
}

bool node_eq(const PropFormula::Node* x, const PropFormula::Node* y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->hash != y->hash || x->kind != y->kind) return false;
  if (x->kind == Conn::Atom) return x->name == y->name;
  return node_eq(x->lhs.get(), y->lhs.get()) && node_eq(x->rhs.get(), y->rhs.get());
}

}  // namespace

bool is_unary(Conn c) { return c == Conn::Not || c == Conn::Box || c == Conn::Diamond; }

bool is_binary(Conn c) {
  return c == Conn::And || c == Conn::Or || c == Conn::Implies || c == Conn::Iff;
}

PropFormula PropFormula::atom(const std::string& name) {
  return PropFormula(make_node(Conn::Atom, name, nullptr, nullptr));
}
PropFormula PropFormula::truth() {
  static const PropFormula t{make_node(Conn::True, "", nullptr, nullptr)};
  return t;
}
PropFormula PropFormula::falsity() {
  static const PropFormula f{make_node(Conn::False, "", nullptr, nullptr)};
  return f;
}
PropFormula PropFormula::negation(PropFormula f) {
  return PropFormula(make_node(Conn::Not, "", f.node_, nullptr));
}
PropFormula PropFormula::box(PropFormula f) {
  return PropFormula(make_node(Conn::Box, "", f.node_, nullptr));
}
PropFormula PropFormula::diamond(PropFormula f) {
  return PropFormula(make_node(Conn::Diamond, "", f.node_, nullptr));
}
PropFormula PropFormula::conj(PropFormula a, PropFormula b) {
  return PropFormula(make_node(Conn::And, "", a.node_, b.node_));
}
PropFormula PropFormula::disj(PropFormula a, PropFormula b) {
  return PropFormula(make_node(Conn::Or, "", a.node_, b.node_));
}
PropFormula PropFormula::implies(PropFormula a, PropFormula b) {
  return PropFormula(make_node(Conn::Implies, "", a.node_, b.node_));
}
PropFormula PropFormula::iff(PropFormula a, PropFormula b) {
  return PropFormula(make_node(Conn::Iff, "", a.node_, b.node_));
}

const std::string& PropFormula::atom_name() const {
  if (node_->kind != Conn::Atom) throw std::logic_error("atom_name: not an atom");
  return node_->name;
}

PropFormula PropFormula::lhs() const {
  if (!node_->lhs) throw std::logic_error("lhs: leaf formula");
  return PropFormula(node_->lhs);
}

PropFormula PropFormula::rhs() const {
  if (!node_->rhs) throw std::logic_error("rhs: not a binary formula");
  return PropFormula(node_->rhs);
}

bool PropFormula::operator==(const PropFormula& o) const {
  return node_eq(node_.get(), o.node_.get());
}

size_t PropFormula::node_count() const {
  size_t n = 1;
  if (node_->lhs) n += lhs().node_count();
  if (node_->rhs) n += rhs().node_count();
  return n;
}

ParseError::ParseError(std::string msg, size_t offset_, std::vector<std::string> expected_)
    : std::runtime_error(std::move(msg)), offset(offset_), expected(std::move(expected_)) {}

namespace {

// Shared scanner for the propositional grammar. Produces one token at a time;
// offsets are byte positions in the original text.
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
    Atom,
    End,
  } kind;
  std::string text;
  size_t offset;
};

bool atom_start(char c) { return c >= 'a' && c <= 'z'; }
bool atom_char(char c) {
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
      tok_.kind = Token::End;
      tok_.text = "";
      return;
    }
    char c = text_[pos_];
    auto two = [&](char a, char b) {
      return c == a && pos_ + 1 < text_.size() && text_[pos_ + 1] == b;
    };
    if (c == '(') { tok_ = {Token::LParen, "(", pos_}; pos_ += 1; return; }
    if (c == ')') { tok_ = {Token::RParen, ")", pos_}; pos_ += 1; return; }
    if (c == '~') { tok_ = {Token::Not, "~", pos_}; pos_ += 1; return; }
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
    if (atom_start(c)) {
      size_t start = pos_;
      while (pos_ < text_.size() && atom_char(text_[pos_])) ++pos_;
      std::string word = text_.substr(start, pos_ - start);
      if (word == "true") { tok_ = {Token::TrueK, word, start}; return; }
      if (word == "false") { tok_ = {Token::FalseK, word, start}; return; }
      tok_ = {Token::Atom, word, start};
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

const std::vector<std::string> kFormulaStart = {"~", "[]", "<>", "true", "false",
                                                "atom", "("};

class PropParser {
 public:
  explicit PropParser(const std::string& text) : lex_(text) {}

  PropFormula parse() {
    PropFormula f = formula();
    if (lex_.peek().kind != Token::End) {
      fail(lex_.peek(), {"&", "|", "->", "<->", "end of input"});
    }
    return f;
  }

 private:
  PropFormula formula() { return iff(); }

  PropFormula iff() {
    PropFormula f = imp();
    while (lex_.peek().kind == Token::Iff) {
      lex_.take();
      f = PropFormula::iff(f, imp());
    }
    return f;
  }

  PropFormula imp() {
    PropFormula f = disj();
    if (lex_.peek().kind == Token::Implies) {
      lex_.take();
      return PropFormula::implies(f, imp());
    }
    return f;
  }

  PropFormula disj() {
    PropFormula f = conj();
    while (lex_.peek().kind == Token::Or) {
      lex_.take();
      f = PropFormula::disj(f, conj());
    }
    return f;
  }

  PropFormula conj() {
    PropFormula f = unary();
    while (lex_.peek().kind == Token::And) {
      lex_.take();
      f = PropFormula::conj(f, unary());
    }
    return f;
  }

  PropFormula unary() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Token::Not:
        lex_.take();
        return PropFormula::negation(unary());
      case Token::Box:
        lex_.take();
        return PropFormula::box(unary());
      case Token::Diamond:
        lex_.take();
        return PropFormula::diamond(unary());
      case Token::TrueK:
        lex_.take();
        return PropFormula::truth();
      case Token::FalseK:
        lex_.take();
        return PropFormula::falsity();
      case Token::Atom:
        return PropFormula::atom(lex_.take().text);
      case Token::LParen: {
        lex_.take();
        PropFormula f = formula();
        if (lex_.peek().kind != Token::RParen) {
          fail(lex_.peek(), {")", "&", "|", "->", "<->"});
        }
        lex_.take();
        return f;
      }
      default:
        fail(t, kFormulaStart);
    }
  }

  Lexer lex_;
};

// Precedence levels used by both the parser above (implicitly) and render.
int prec(Conn c) {
  switch (c) {
    case Conn::Iff: return 1;
    case Conn::Implies: return 2;
    case Conn::Or: return 3;
    case Conn::And: return 4;
    case Conn::Not:
    case Conn::Box:
    case Conn::Diamond: return 5;
    default: return 6;  // atoms and constants
  }
}

const char* op_text(Conn c) {
  switch (c) {
    case Conn::Not: return "~";
    case Conn::Box: return "[]";
    case Conn::Diamond: return "<>";
    case Conn::And: return "&";
    case Conn::Or: return "|";
    case Conn::Implies: return "->";
    case Conn::Iff: return "<->";
    default: return "";
  }
}

void render_into(const PropFormula& f, std::string& out, bool parenthesize) {
  if (parenthesize) out += '(';
  switch (f.kind()) {
    case Conn::True: out += "true"; break;
    case Conn::False: out += "false"; break;
    case Conn::Atom: out += f.atom_name(); break;
    case Conn::Not:
    case Conn::Box:
    case Conn::Diamond: {
      out += op_text(f.kind());
      PropFormula c = f.lhs();
      render_into(c, out, prec(c.kind()) < 5);
      break;
    }
    default: {
      // "->" is right-associative, the rest left-associative.
      int p = prec(f.kind());
      bool right_assoc = f.kind() == Conn::Implies;
      PropFormula a = f.lhs(), b = f.rhs();
      int pa = prec(a.kind()), pb = prec(b.kind());
      render_into(a, out, right_assoc ? pa <= p : pa < p);
      out += ' ';
      out += op_text(f.kind());
      out += ' ';
      render_into(b, out, right_assoc ? pb < p : pb <= p);
      break;
    }
  }
  if (parenthesize) out += ')';
}

}  // namespace

PropFormula parse_prop(const std::string& text) { return PropParser(text).parse(); }

std::string render(const PropFormula& f) {
  std::string out;
  render_into(f, out, false);
  return out;
}

Substitution::Substitution(std::initializer_list<std::pair<std::string, PropFormula>> items) {
  for (const auto& [k, v] : items) map_.emplace(k, v);
}

void Substitution::set(const std::string& atom, PropFormula f) {
  map_.insert_or_assign(atom, std::move(f));
}

const PropFormula* Substitution::find(const std::string& atom) const {
  auto it = map_.find(atom);
  return it == map_.end() ? nullptr : &it->second;
}

Substitution Substitution::then(const Substitution& s2) const {
  Substitution out;
  for (const auto& [k, v] : map_) out.set(k, substitute(v, s2));
  for (const auto& [k, v] : s2.map_) {
    if (!map_.count(k)) out.set(k, v);
  }
  return out;
}

namespace {

PropFormula substitute_memo(const PropFormula& f, const Substitution& s,
                            std::unordered_map<const PropFormula::Node*, PropFormula>& memo) {
  auto it = memo.find(f.raw());
  if (it != memo.end()) return it->second;
  PropFormula out = f;
  switch (f.kind()) {
    case Conn::Atom:
      if (const PropFormula* r = s.find(f.atom_name())) out = *r;
      break;
    case Conn::True:
    case Conn::False:
      break;
    case Conn::Not:
      out = PropFormula::negation(substitute_memo(f.lhs(), s, memo));
      break;
    case Conn::Box:
      out = PropFormula::box(substitute_memo(f.lhs(), s, memo));
      break;
    case Conn::Diamond:
      out = PropFormula::diamond(substitute_memo(f.lhs(), s, memo));
      break;
    case Conn::And:
      out = PropFormula::conj(substitute_memo(f.lhs(), s, memo),
                              substitute_memo(f.rhs(), s, memo));
      break;
    case Conn::Or:
      out = PropFormula::disj(substitute_memo(f.lhs(), s, memo),
                              substitute_memo(f.rhs(), s, memo));
      break;
    case Conn::Implies:
      out = PropFormula::implies(substitute_memo(f.lhs(), s, memo),
                                 substitute_memo(f.rhs(), s, memo));
      break;
    case Conn::Iff:
      out = PropFormula::iff(substitute_memo(f.lhs(), s, memo),
                             substitute_memo(f.rhs(), s, memo));
      break;
  }
  memo.emplace(f.raw(), out);
  return out;
}

}  // namespace

PropFormula substitute(const PropFormula& f, const Substitution& s) {
  std::unordered_map<const PropFormula::Node*, PropFormula> memo;
  return substitute_memo(f, s, memo);
}

std::vector<PropFormula> subformula_closure(const PropFormula& f) {
  std::vector<PropFormula> out;
  std::unordered_set<PropFormula> seen;
  // Post-order so children always precede their parents.
  std::function<void(const PropFormula&)> walk = [&](const PropFormula& g) {
    if (seen.count(g)) return;
    if (is_unary(g.kind())) {
      walk(g.lhs());
    } else if (is_binary(g.kind())) {
      walk(g.lhs());
      walk(g.rhs());
    }
    if (seen.insert(g).second) out.push_back(g);
  };
  walk(f);
  return out;
}

std::vector<std::string> atoms_of(const PropFormula& f) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::function<void(const PropFormula&)> walk = [&](const PropFormula& g) {
    if (g.kind() == Conn::Atom) {
      if (seen.insert(g.atom_name()).second) out.push_back(g.atom_name());
      return;
    }
    if (is_unary(g.kind())) {
      walk(g.lhs());
    } else if (is_binary(g.kind())) {
      walk(g.lhs());
      walk(g.rhs());
    }
  };
  walk(f);
  return out;
}

}  // namespace modalab
