#pragma once

// Exact symbolic semantics of product formulas.
//
// On a cell G_eps every product function is either identically 0 or strictly
// positive. In the positive case, substituting u_i = log t_i for the positive
// coordinates turns it into a continuous piecewise-linear function on the
// cone {u <= 0}:
//
//   conj -> +,  meet -> min,  join -> max,  impl -> min(0, g - f).
//
// We keep such functions in min-of-max normal form over homogeneous integer
// linear forms (a MinMaxTerm) and decide identities with exact LP.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "prodstate/cells.hpp"
#include "prodstate/rational.hpp"
#include "prodstate/syntax.hpp"

namespace prodstate {

// Homogeneous linear form sum_i a_i u_i over the positive coordinates of a cell.
class LinForm {
 public:
  explicit LinForm(std::size_t dims = 0) : coeffs_(dims) {}
  explicit LinForm(std::vector<Integer> coeffs) : coeffs_(std::move(coeffs)) {}

  static LinForm unit(std::size_t dims, std::size_t i);

  std::size_t dims() const { return coeffs_.size(); }
  const Integer& coeff(std::size_t i) const { return coeffs_[i]; }
  const std::vector<Integer>& coeffs() const { return coeffs_; }

  // this >= other everywhere on {u <= 0}, i.e. (this - other) has no
  // positive coefficient.
  bool dominates(const LinForm& other) const;
  // this >= 0 everywhere on {u <= 0}.
  bool nonnegative_on_cone() const;
  Integer l1_norm() const;

  // exp(form) at t = exp(u): the monomial prod_i t_i^{a_i}; t must be positive.
  Rational monomial(std::span<const Rational> t) const;
  double value(std::span<const double> u) const;

  friend LinForm operator+(const LinForm& a, const LinForm& b);
  friend LinForm operator-(const LinForm& a, const LinForm& b);
  friend LinForm operator-(const LinForm& a);
  friend bool operator==(const LinForm& a, const LinForm& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator<(const LinForm& a, const LinForm& b);

 private:
  std::vector<Integer> coeffs_;
};

class TermTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// min over branches of max over the forms in each branch.
class MinMaxTerm {
 public:
  using Branch = std::vector<LinForm>;

  MinMaxTerm() = default;
  // Branches are pruned and sorted on construction.
  MinMaxTerm(std::size_t dims, std::vector<Branch> branches);

  static MinMaxTerm zero(std::size_t dims);  // the constant 0 (truth value 1)
  static MinMaxTerm form(const LinForm& f);

  std::size_t dims() const { return dims_; }
  const std::vector<Branch>& branches() const { return branches_; }
  std::size_t form_count() const;

  friend MinMaxTerm operator+(const MinMaxTerm& a, const MinMaxTerm& b);
  friend MinMaxTerm operator-(const MinMaxTerm& a);
  friend MinMaxTerm min(const MinMaxTerm& a, const MinMaxTerm& b);
  friend MinMaxTerm max(const MinMaxTerm& a, const MinMaxTerm& b);
  // Residuum in log space: min(0, g - f).
  friend MinMaxTerm residuum(const MinMaxTerm& f, const MinMaxTerm& g);

  // Exact value of exp(term) at a point with positive coordinates t.
  Rational exp_value(std::span<const Rational> t) const;
  double value(std::span<const double> u) const;

  // Whether the term is 0 on the whole cone. Requires the term to be <= 0
  // everywhere (true for every lowered formula).
  bool is_identically_zero() const;

  std::string to_string(const CellIndex& cell) const;

  friend bool operator==(const MinMaxTerm& a, const MinMaxTerm& b) {
    return a.dims_ == b.dims_ && a.branches_ == b.branches_;
  }

 private:
  std::size_t dims_ = 0;
  std::vector<Branch> branches_;
};

// Restriction of a product function to one cell: identically 0, or exp of a
// MinMaxTerm.
class CellFunc {
 public:
  static CellFunc zero() { return CellFunc(); }
  static CellFunc pwl(MinMaxTerm t) {
    CellFunc c;
    c.term_ = std::move(t);
    return c;
  }

  bool is_zero() const { return !term_.has_value(); }
  const MinMaxTerm& term() const { return *term_; }

  friend bool operator==(const CellFunc&, const CellFunc&) = default;

 private:
  std::optional<MinMaxTerm> term_;
};

class CellwiseFunc {
 public:
  CellwiseFunc() = default;
  CellwiseFunc(std::size_t arity, std::vector<CellFunc> cells);

  std::size_t arity() const { return arity_; }
  const CellFunc& at(const CellIndex& eps) const { return cells_.at(eps.ordinal()); }
  const CellFunc& at_ordinal(std::size_t ordinal) const { return cells_.at(ordinal); }
  std::size_t cell_count() const { return cells_.size(); }
  bool is_zero_everywhere() const;

 private:
  std::size_t arity_ = 0;
  std::vector<CellFunc> cells_;
};

// Nonzero rational coefficients paired with formulas.
struct LinearCombination {
  std::vector<std::pair<Rational, Formula>> terms;

  LinearCombination& add(const Rational& coeff, const Formula& f) {
    terms.emplace_back(coeff, f);
    return *this;
  }
};

CellwiseFunc lower(const Formula& phi, std::size_t n);

// Throws PointError when t is outside [0,1]^n.
Rational eval_cellwise(const CellwiseFunc& F, const Point& t);

bool is_tautology(const Formula& phi, std::size_t n);
bool implies(const Formula& phi, const Formula& psi, std::size_t n);
bool is_equivalent(const Formula& phi, const Formula& psi, std::size_t n);
bool is_boolean(const Formula& phi, std::size_t n);
// Whether phi is the constant 0 function, i.e. lower(phi) is ZERO on every cell.
bool is_zero_function(const Formula& phi, std::size_t n);

// Merges terms whose formulas coincide on G_eps, drops zero coefficients and
// terms vanishing on G_eps. Representatives keep their first occurrence order.
LinearCombination normalize_combination(const LinearCombination& c, const CellIndex& eps);

}  // namespace prodstate
