#pragma once

// The one-generator free product algebra F_P(1).
//
// Every element is determined by its value at 0 (0 or 1) and its shape on
// (0,1]: either identically 0 or t^e for some e >= 0. States on F_P(1)
// correspond to distributions on the prime filters
//
//   <~x>,   <~~x> >= <x> >= <x^2> >= ...,   and the limit of the chain,
//
// the last one carrying lim_n s(x^n).

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "prodstate/rational.hpp"
#include "prodstate/states.hpp"
#include "prodstate/syntax.hpp"

namespace prodstate {

struct Fp1Canon {
  bool at_zero = false;
  std::optional<std::uint64_t> pow;  // nullopt: 0 on (0,1]

  static Fp1Canon zero_on_pos(bool at_zero) { return {at_zero, std::nullopt}; }
  static Fp1Canon power(bool at_zero, std::uint64_t e) { return {at_zero, e}; }

  // A representative: 0, 1, ~x, ~~x, x^e or x^e | ~x.
  Formula to_formula() const;
  std::string to_string() const;
  Rational value(const Rational& t) const;

  friend bool operator==(const Fp1Canon&, const Fp1Canon&) = default;
};

// Reads the canonical form off the cellwise lowering. Throws ArityError for
// formulas in more than one variable.
Fp1Canon canonicalize(const Formula& f);

Fp1Canon canon_conj(const Fp1Canon& a, const Fp1Canon& b);
Fp1Canon canon_impl(const Fp1Canon& a, const Fp1Canon& b);
Fp1Canon canon_meet(const Fp1Canon& a, const Fp1Canon& b);
Fp1Canon canon_join(const Fp1Canon& a, const Fp1Canon& b);
// Bottom-up fold of the four operations over the AST.
Fp1Canon canon_fold(const Formula& f);

struct GeometricTail {
  Rational c;  // > 0
  Rational r;  // in (0,1)
  friend bool operator==(const GeometricTail&, const GeometricTail&) = default;
};

// Mass at <x^n> is prefix[n-1] for n <= N = prefix.size() and
// sum_j c_j r_j^n for n > N.
struct SpectrumDist {
  Rational neg;
  Rational nn;
  std::vector<Rational> prefix;
  std::vector<GeometricTail> tails;
  Rational limit;

  Rational chain_mass(std::uint64_t n) const;       // n >= 1
  Rational chain_mass_from(std::uint64_t n) const;  // sum over m >= n
  Rational total_mass() const;

  // Merges tails with equal ratio, drops zero tails, sorts by ratio and
  // shortens the prefix while its last entry agrees with the tails.
  SpectrumDist canonical() const;

  friend bool operator==(const SpectrumDist&, const SpectrumDist&) = default;
};

class DistError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Throws DistError naming the first violated invariant: nonnegative masses,
// tails with c > 0 and r in (0,1), total mass 1, condition (D).
void validate_dist(const SpectrumDist& d);

// Zero masses are upward closed along <~~x> >= <x> >= <x^2> >= ...; the limit
// point is not part of the order.
bool check_condition_D(const SpectrumDist& d);

struct DistResult {
  SpectrumDist dist;
  bool exact = false;
  // Chain mass beyond the horizon that could not be resolved; 0 when exact.
  double unresolved = 0;
};

// Exact for states that know the closed form of s(x^n) (Dirac, mixtures,
// distribution states); otherwise the chain is read off up to the horizon.
DistResult dist_from_state(const State& s, std::uint64_t horizon = 64);

// s_d(z) = sum of d over the downset R_z. Validates d first.
class DistState : public State {
 public:
  explicit DistState(SpectrumDist d);

  const SpectrumDist& dist() const { return d_; }
  Rational eval_canon(const Fp1Canon& c) const;

  std::size_t arity() const override { return 1; }
  bool is_exact() const override { return true; }
  Value eval(const Formula& f) const override;
  std::string kind() const override { return "dist"; }
  std::optional<ChainLaw> chain_law() const override;

 private:
  SpectrumDist d_;
};

std::shared_ptr<const DistState> state_from_dist(const SpectrumDist& d);

}  // namespace prodstate
