#include "prodstate/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace prodstate {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  // splitmix64 finalizer over the running hash; deterministic across runs.
  std::uint64_t x = static_cast<std::uint64_t>(h) ^ (static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL +
                                                     (static_cast<std::uint64_t>(h) << 6) +
                                                     (static_cast<std::uint64_t>(h) >> 2));
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return static_cast<std::size_t>(x);
}

}  // namespace

// ---------------------------------------------------------------- Formula

struct Formula::Node {
  Op op;
  std::size_t var = 0;
  Formula l{NoInit{}}, r{NoInit{}};  // only set for binary ops
  std::size_t hash = 0;
  std::size_t depth = 0;
  std::size_t size = 1;
  std::size_t leaves = 0;
  std::size_t min_arity = 0;
};

namespace {
const std::shared_ptr<const Formula::Node>& shared_leaf(Op op) {
  static const auto bot = [] {
    auto n = std::make_shared<Formula::Node>();
    n->op = Op::Bot;
    n->hash = mix(0, 1);
    return std::shared_ptr<const Formula::Node>(n);
  }();
  static const auto top = [] {
    auto n = std::make_shared<Formula::Node>();
    n->op = Op::Top;
    n->hash = mix(0, 2);
    return std::shared_ptr<const Formula::Node>(n);
  }();
  return op == Op::Bot ? bot : top;
}
}  // namespace

Formula::Formula() : node_(shared_leaf(Op::Bot)) {}

Formula Formula::make(Op op, std::size_t var, const Formula* l, const Formula* r) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->var = var;
  n->hash = mix(static_cast<std::size_t>(op) + 1, var);
  if (op == Op::Var) {
    n->leaves = 1;
    n->min_arity = var + 1;
  }
  if (l != nullptr) {
    n->l = *l;
    n->r = *r;
    n->hash = mix(mix(n->hash, l->hash()), r->hash());
    n->depth = 1 + std::max(l->depth(), r->depth());
    n->size = 1 + l->size() + r->size();
    n->leaves = l->var_leaves() + r->var_leaves();
    n->min_arity = std::max(l->min_arity(), r->min_arity());
  }
  return Formula(std::move(n));
}

Formula Formula::bot() { return Formula(shared_leaf(Op::Bot)); }
Formula Formula::top() { return Formula(shared_leaf(Op::Top)); }
Formula Formula::var(std::size_t index) { return make(Op::Var, index, nullptr, nullptr); }
Formula Formula::conj(const Formula& l, const Formula& r) { return make(Op::Conj, 0, &l, &r); }
Formula Formula::impl(const Formula& l, const Formula& r) { return make(Op::Impl, 0, &l, &r); }
Formula Formula::meet(const Formula& l, const Formula& r) { return make(Op::Meet, 0, &l, &r); }
Formula Formula::join(const Formula& l, const Formula& r) { return make(Op::Join, 0, &l, &r); }
Formula Formula::neg(const Formula& f) { return impl(f, bot()); }

Formula Formula::pow(const Formula& f, std::size_t k) {
  if (k == 0) throw std::invalid_argument("power exponent must be at least 1");
  Formula acc = f;
  for (std::size_t i = 1; i < k; ++i) acc = conj(acc, f);
  return acc;
}

Op Formula::op() const { return node_->op; }
std::size_t Formula::var_index() const { return node_->var; }
const Formula& Formula::lhs() const { return node_->l; }
const Formula& Formula::rhs() const { return node_->r; }
std::size_t Formula::hash() const { return node_->hash; }
std::size_t Formula::depth() const { return node_->depth; }
std::size_t Formula::size() const { return node_->size; }
std::size_t Formula::var_leaves() const { return node_->leaves; }
std::size_t Formula::min_arity() const { return node_->min_arity; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.op() != b.op() || a.size() != b.size()) return false;
  switch (a.op()) {
    case Op::Bot:
    case Op::Top:
      return true;
    case Op::Var:
      return a.var_index() == b.var_index();
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

void require_arity(const Formula& f, std::size_t arity) {
  if (f.min_arity() > arity)
    throw ArityError("formula uses x" + std::to_string(f.min_arity() - 1) + " but arity is " +
                     std::to_string(arity));
}

// ----------------------------------------------------------- ModalFormula

struct ModalFormula::Node {
  ModalOp op;
  Formula event;
  ModalFormula l{NoInit{}}, r{NoInit{}};
  std::size_t hash = 0;
  std::size_t min_arity = 0;
};

namespace {
const std::shared_ptr<const ModalFormula::Node>& shared_modal_leaf(ModalOp op) {
  static const auto zero = [] {
    auto n = std::make_shared<ModalFormula::Node>();
    n->op = ModalOp::Zero;
    n->hash = mix(100, 1);
    return std::shared_ptr<const ModalFormula::Node>(n);
  }();
  static const auto one = [] {
    auto n = std::make_shared<ModalFormula::Node>();
    n->op = ModalOp::One;
    n->hash = mix(100, 2);
    return std::shared_ptr<const ModalFormula::Node>(n);
  }();
  return op == ModalOp::Zero ? zero : one;
}
}  // namespace

ModalFormula::ModalFormula() : node_(shared_modal_leaf(ModalOp::Zero)) {}

ModalFormula ModalFormula::make(ModalOp op, const Formula* event, const ModalFormula* l,
                                const ModalFormula* r) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->hash = mix(200, static_cast<std::size_t>(op));
  if (event != nullptr) {
    n->event = *event;
    n->hash = mix(n->hash, event->hash());
    n->min_arity = event->min_arity();
  }
  if (l != nullptr) {
    n->l = *l;
    n->hash = mix(n->hash, l->hash());
    n->min_arity = std::max(n->min_arity, l->min_arity());
  }
  if (r != nullptr) {
    n->r = *r;
    n->hash = mix(n->hash, r->hash());
    n->min_arity = std::max(n->min_arity, r->min_arity());
  }
  return ModalFormula(std::move(n));
}

ModalFormula ModalFormula::zero() { return ModalFormula(shared_modal_leaf(ModalOp::Zero)); }
ModalFormula ModalFormula::one() { return ModalFormula(shared_modal_leaf(ModalOp::One)); }
ModalFormula ModalFormula::atom(const Formula& event) { return make(ModalOp::Atom, &event, nullptr, nullptr); }
ModalFormula ModalFormula::lneg(const ModalFormula& a) { return make(ModalOp::LNeg, nullptr, &a, nullptr); }
ModalFormula ModalFormula::limpl(const ModalFormula& a, const ModalFormula& b) {
  return make(ModalOp::LImpl, nullptr, &a, &b);
}
ModalFormula ModalFormula::delta(const ModalFormula& a) { return make(ModalOp::Delta, nullptr, &a, nullptr); }

ModalFormula ModalFormula::oplus(const ModalFormula& a, const ModalFormula& b) { return limpl(lneg(a), b); }
ModalFormula ModalFormula::ominus(const ModalFormula& a, const ModalFormula& b) { return lneg(limpl(a, b)); }
ModalFormula ModalFormula::lequiv(const ModalFormula& a, const ModalFormula& b) {
  return lneg(limpl(limpl(a, b), lneg(limpl(b, a))));
}

ModalOp ModalFormula::op() const { return node_->op; }
const Formula& ModalFormula::event() const { return node_->event; }
const ModalFormula& ModalFormula::lhs() const { return node_->l; }
const ModalFormula& ModalFormula::rhs() const { return node_->r; }
std::size_t ModalFormula::hash() const { return node_->hash; }
std::size_t ModalFormula::min_arity() const { return node_->min_arity; }

bool operator==(const ModalFormula& a, const ModalFormula& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.op() != b.op()) return false;
  switch (a.op()) {
    case ModalOp::Zero:
    case ModalOp::One:
      return true;
    case ModalOp::Atom:
      return a.event() == b.event();
    case ModalOp::LNeg:
    case ModalOp::Delta:
      return a.lhs() == b.lhs();
    case ModalOp::LImpl:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

// ----------------------------------------------------------------- Errors

ParseError::ParseError(Kind kind, std::size_t position, const std::string& message)
    : std::runtime_error("at position " + std::to_string(position) + ": " + message),
      kind_(kind),
      position_(position) {}

// ----------------------------------------------------------------- Lexer

namespace {

enum class Tok {
  Number, Var, Ident, Tilde, Caret, Star, Amp, Bar, Arrow,
  LParen, RParen, Bang, OPlus, OMinus, DArrow, Equiv, End
};

struct Token {
  Tok kind;
  std::size_t pos;
  std::string text;
  std::size_t value = 0;  // Number / Var
};

constexpr std::size_t kMaxExponent = 4096;

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto starts = [&](std::string_view p) { return s.substr(i, p.size()) == p; };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      std::string digits(s.substr(start, i - start));
      if (digits.size() > 9) throw ParseError(ParseError::Kind::Syntax, start, "number too large");
      out.push_back({Tok::Number, start, digits, std::stoul(digits)});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      std::string word(s.substr(start, i - start));
      if (word.size() > 1 && word[0] == 'x' &&
          std::all_of(word.begin() + 1, word.end(), [](char d) { return std::isdigit(static_cast<unsigned char>(d)); })) {
        if (word.size() > 10) throw ParseError(ParseError::Kind::Syntax, start, "variable index too large");
        out.push_back({Tok::Var, start, word, std::stoul(word.substr(1))});
      } else {
        out.push_back({Tok::Ident, start, word});
      }
      continue;
    }
    if (starts("(+)")) { out.push_back({Tok::OPlus, start, "(+)"}); i += 3; continue; }
    if (starts("(-)")) { out.push_back({Tok::OMinus, start, "(-)"}); i += 3; continue; }
    if (starts("<=>")) { out.push_back({Tok::Equiv, start, "<=>"}); i += 3; continue; }
    if (starts("->")) { out.push_back({Tok::Arrow, start, "->"}); i += 2; continue; }
    if (starts("=>")) { out.push_back({Tok::DArrow, start, "=>"}); i += 2; continue; }
    Tok k;
    switch (c) {
      case '~': k = Tok::Tilde; break;
      case '^': k = Tok::Caret; break;
      case '*': k = Tok::Star; break;
      case '&': k = Tok::Amp; break;
      case '|': k = Tok::Bar; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '!': k = Tok::Bang; break;
      default:
        throw ParseError(ParseError::Kind::Syntax, start, std::string("unexpected character '") + c + "'");
    }
    out.push_back({k, start, std::string(1, c)});
    ++i;
  }
  out.push_back({Tok::End, s.size(), "end of input"});
  return out;
}

// ----------------------------------------------------------------- Parser

class Parser {
 public:
  Parser(std::string_view text, std::size_t arity) : toks_(lex(text)), arity_(arity) {}

  Formula product_only() {
    Formula f = impl();
    expect(Tok::End);
    return f;
  }

  ModalFormula modal_only() {
    ModalFormula f = equiv();
    expect(Tok::End);
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const Token& t, const std::string& what) const {
    throw ParseError(ParseError::Kind::Syntax, t.pos, "expected " + what + ", found '" + t.text + "'");
  }
  void expect(Tok k) {
    if (peek().kind == k) {
      ++pos_;
      return;
    }
    switch (k) {
      case Tok::RParen: fail(peek(), "')'");
      case Tok::LParen: fail(peek(), "'('");
      case Tok::End: fail(peek(), "end of input");
      default: fail(peek(), "token");
    }
  }

  // product grammar, loosest first
  Formula impl() {
    Formula l = join();
    if (accept(Tok::Arrow)) return Formula::impl(l, impl());
    return l;
  }
  Formula join() {
    Formula l = meet();
    while (accept(Tok::Bar)) l = Formula::join(l, meet());
    return l;
  }
  Formula meet() {
    Formula l = conj();
    while (accept(Tok::Amp)) l = Formula::meet(l, conj());
    return l;
  }
  Formula conj() {
    Formula l = unary();
    while (accept(Tok::Star)) l = Formula::conj(l, unary());
    return l;
  }
  Formula unary() {
    if (accept(Tok::Tilde)) return Formula::neg(unary());
    return postfix();
  }
  Formula postfix() {
    Formula f = primary();
    while (accept(Tok::Caret)) {
      const Token& t = peek();
      if (t.kind != Tok::Number) fail(t, "exponent");
      next();
      if (t.value == 0) throw ParseError(ParseError::Kind::Syntax, t.pos, "exponent must be at least 1");
      if (t.value > kMaxExponent) throw ParseError(ParseError::Kind::Syntax, t.pos, "exponent too large");
      f = Formula::pow(f, t.value);
    }
    return f;
  }
  Formula primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        if (t.text == "0") { next(); return Formula::bot(); }
        if (t.text == "1") { next(); return Formula::top(); }
        fail(t, "formula");
      case Tok::Var:
        if (t.value >= arity_)
          throw ParseError(ParseError::Kind::UnknownVariable, t.pos,
                           "unknown variable " + t.text + " (arity " + std::to_string(arity_) + ")");
        next();
        return Formula::var(t.value);
      case Tok::LParen: {
        next();
        Formula f = impl();
        expect(Tok::RParen);
        return f;
      }
      case Tok::Ident:
        if (t.text == "P" || t.text == "D") {
          if (in_event_)
            throw ParseError(ParseError::Kind::NestedModality, t.pos,
                             "modal operator " + t.text + " inside a probability atom");
          throw ParseError(ParseError::Kind::Syntax, t.pos,
                           "modal operator " + t.text + " in a product formula");
        }
        throw ParseError(ParseError::Kind::Syntax, t.pos, "unknown identifier '" + t.text + "'");
      case Tok::Bang: case Tok::OPlus: case Tok::OMinus: case Tok::DArrow: case Tok::Equiv:
        if (in_event_)
          throw ParseError(ParseError::Kind::NestedModality, t.pos,
                           "modal connective '" + t.text + "' inside a probability atom");
        fail(t, "formula");
      default:
        fail(t, "formula");
    }
  }

  // modal grammar, loosest first
  ModalFormula equiv() {
    ModalFormula l = mimpl();
    while (accept(Tok::Equiv)) l = ModalFormula::lequiv(l, mimpl());
    return l;
  }
  ModalFormula mimpl() {
    ModalFormula l = madd();
    if (accept(Tok::DArrow)) return ModalFormula::limpl(l, mimpl());
    return l;
  }
  ModalFormula madd() {
    ModalFormula l = munary();
    for (;;) {
      if (accept(Tok::OPlus)) l = ModalFormula::oplus(l, munary());
      else if (accept(Tok::OMinus)) l = ModalFormula::ominus(l, munary());
      else return l;
    }
  }
  ModalFormula munary() {
    if (accept(Tok::Bang)) return ModalFormula::lneg(munary());
    const Token& t = peek();
    if (t.kind == Tok::Ident && t.text == "D") {
      next();
      expect(Tok::LParen);
      ModalFormula f = equiv();
      expect(Tok::RParen);
      return ModalFormula::delta(f);
    }
    return mprimary();
  }
  ModalFormula mprimary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        if (t.text == "0") { next(); return ModalFormula::zero(); }
        if (t.text == "1") { next(); return ModalFormula::one(); }
        fail(t, "modal formula");
      case Tok::Ident:
        if (t.text == "P") {
          next();
          expect(Tok::LParen);
          in_event_ = true;
          Formula e = impl();
          in_event_ = false;
          expect(Tok::RParen);
          return ModalFormula::atom(e);
        }
        throw ParseError(ParseError::Kind::Syntax, t.pos, "unknown identifier '" + t.text + "'");
      case Tok::LParen: {
        next();
        ModalFormula f = equiv();
        expect(Tok::RParen);
        return f;
      }
      case Tok::Var: case Tok::Tilde:
        throw ParseError(ParseError::Kind::Syntax, t.pos,
                         "product formula outside P(...) in a modal formula");
      default:
        fail(t, "modal formula");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t arity_;
  bool in_event_ = false;
};

// ---------------------------------------------------------------- Printer

// Binding strength, loosest = 1.
int prec(const Formula& f) {
  if (f.is_neg()) return 5;
  switch (f.op()) {
    case Op::Impl: return 1;
    case Op::Join: return 2;
    case Op::Meet: return 3;
    case Op::Conj: return 4;
    default: return 6;
  }
}

void print_into(const Formula& f, std::string& out);

void print_child(const Formula& f, bool parens, std::string& out) {
  if (parens) out += '(';
  print_into(f, out);
  if (parens) out += ')';
}

void print_into(const Formula& f, std::string& out) {
  if (f.is_neg()) {
    out += '~';
    print_child(f.lhs(), prec(f.lhs()) < 5, out);
    return;
  }
  switch (f.op()) {
    case Op::Bot: out += '0'; return;
    case Op::Top: out += '1'; return;
    case Op::Var: out += 'x'; out += std::to_string(f.var_index()); return;
    case Op::Impl:
      print_child(f.lhs(), prec(f.lhs()) <= 1, out);
      out += " -> ";
      print_child(f.rhs(), prec(f.rhs()) < 1, out);
      return;
    default: {
      int p = prec(f);
      const char* sym = f.op() == Op::Conj ? " * " : f.op() == Op::Meet ? " & " : " | ";
      print_child(f.lhs(), prec(f.lhs()) < p, out);
      out += sym;
      print_child(f.rhs(), prec(f.rhs()) <= p, out);
    }
  }
}

int mprec(const ModalFormula& f) {
  switch (f.op()) {
    case ModalOp::LImpl: return 1;
    case ModalOp::LNeg: return 3;
    default: return 4;
  }
}

void print_modal_into(const ModalFormula& f, std::string& out) {
  switch (f.op()) {
    case ModalOp::Zero: out += '0'; return;
    case ModalOp::One: out += '1'; return;
    case ModalOp::Atom:
      out += "P(";
      print_into(f.event(), out);
      out += ')';
      return;
    case ModalOp::Delta:
      out += "D(";
      print_modal_into(f.lhs(), out);
      out += ')';
      return;
    case ModalOp::LNeg: {
      out += '!';
      bool parens = mprec(f.lhs()) < 3;
      if (parens) out += '(';
      print_modal_into(f.lhs(), out);
      if (parens) out += ')';
      return;
    }
    case ModalOp::LImpl: {
      bool lp = mprec(f.lhs()) <= 1;
      if (lp) out += '(';
      print_modal_into(f.lhs(), out);
      if (lp) out += ')';
      out += " => ";
      print_modal_into(f.rhs(), out);
      return;
    }
  }
}

}  // namespace

Formula parse_product(std::string_view text, std::size_t arity) { return Parser(text, arity).product_only(); }

ModalFormula parse_modal(std::string_view text, std::size_t arity) { return Parser(text, arity).modal_only(); }

std::string print_formula(const Formula& f) {
  std::string out;
  print_into(f, out);
  return out;
}

std::string print_formula(const ModalFormula& f) {
  std::string out;
  print_modal_into(f, out);
  return out;
}

}  // namespace prodstate
