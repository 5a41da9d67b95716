#pragma once

// Product-logic formulas, Lukasiewicz-Delta modal formulas over them, and
// their text syntax.
//
// Both ASTs are immutable and hash-consed by value: copies share nodes, and
// structural hash/equality are O(1) for the common mismatch case.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace prodstate {

enum class Op : std::uint8_t { Bot, Top, Var, Conj, Impl, Meet, Join };

class Formula {
 public:
  struct Node;

  Formula();  // Bot

  static Formula bot();
  static Formula top();
  static Formula var(std::size_t index);
  static Formula conj(const Formula& l, const Formula& r);
  static Formula impl(const Formula& l, const Formula& r);
  static Formula meet(const Formula& l, const Formula& r);
  static Formula join(const Formula& l, const Formula& r);

  // Derived connectives, desugared on construction.
  static Formula neg(const Formula& f);                 // f -> 0
  static Formula pow(const Formula& f, std::size_t k);  // k-fold left-nested conj, k >= 1

  Op op() const;
  std::size_t var_index() const;  // only for Op::Var
  const Formula& lhs() const;     // only for binary ops
  const Formula& rhs() const;

  bool is_binary() const { return op() >= Op::Conj; }
  bool is_neg() const { return op() == Op::Impl && rhs().op() == Op::Bot; }

  std::size_t hash() const;
  std::size_t depth() const;      // leaves have depth 0
  std::size_t size() const;       // node count
  std::size_t var_leaves() const; // number of Var occurrences
  // One more than the largest variable index; 0 for closed formulas.
  std::size_t min_arity() const;

  const void* id() const { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

 private:
  struct NoInit {};
  explicit Formula(NoInit) {}
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make(Op op, std::size_t var, const Formula* l, const Formula* r);

  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

enum class ModalOp : std::uint8_t { Zero, One, Atom, LNeg, LImpl, Delta };

class ModalFormula {
 public:
  struct Node;

  ModalFormula();  // Zero

  static ModalFormula zero();
  static ModalFormula one();
  static ModalFormula atom(const Formula& event);
  static ModalFormula lneg(const ModalFormula& a);
  static ModalFormula limpl(const ModalFormula& a, const ModalFormula& b);
  static ModalFormula delta(const ModalFormula& a);

  // Lukasiewicz derived connectives:
  //   a (+) b = !a => b,  a (-) b = !(a => b),
  //   a <=> b = (a => b) (.) (b => a)  with  x (.) y = !(x => !y).
  static ModalFormula oplus(const ModalFormula& a, const ModalFormula& b);
  static ModalFormula ominus(const ModalFormula& a, const ModalFormula& b);
  static ModalFormula lequiv(const ModalFormula& a, const ModalFormula& b);

  ModalOp op() const;
  const Formula& event() const;      // only for Atom
  const ModalFormula& lhs() const;   // LNeg, Delta, LImpl
  const ModalFormula& rhs() const;   // LImpl

  std::size_t hash() const;
  std::size_t min_arity() const;
  const void* id() const { return node_.get(); }

  friend bool operator==(const ModalFormula& a, const ModalFormula& b);
  friend bool operator!=(const ModalFormula& a, const ModalFormula& b) { return !(a == b); }

 private:
  struct NoInit {};
  explicit ModalFormula(NoInit) {}
  explicit ModalFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static ModalFormula make(ModalOp op, const Formula* event, const ModalFormula* l,
                           const ModalFormula* r);

  std::shared_ptr<const Node> node_;
};

struct ModalFormulaHash {
  std::size_t operator()(const ModalFormula& f) const { return f.hash(); }
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownVariable, NestedModality };

  ParseError(Kind kind, std::size_t position, const std::string& message);

  Kind kind() const { return kind_; }
  std::size_t position() const { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

// Variables are x0 .. x(arity-1).
Formula parse_product(std::string_view text, std::size_t arity);
ModalFormula parse_modal(std::string_view text, std::size_t arity);

std::string print_formula(const Formula& f);
std::string print_formula(const ModalFormula& f);

// Thrown when a formula mentions a variable outside the declared arity.
class ArityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void require_arity(const Formula& f, std::size_t arity);

}  // namespace prodstate

template <>
struct std::hash<prodstate::Formula> : prodstate::FormulaHash {};
template <>
struct std::hash<prodstate::ModalFormula> : prodstate::ModalFormulaHash {};
