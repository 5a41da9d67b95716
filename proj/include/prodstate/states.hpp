#pragma once

// States of the free product algebra F_P(n): normalized, lattice-additive,
// monotone maps into [0,1] with the double-negation zero axiom S4.
//
// Backends: point evaluation (Dirac), finite mixtures of points, a seeded
// Monte-Carlo sampler, and arbitrary callables (used for synthetic maps and
// the one-variable distribution states).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "prodstate/cells.hpp"
#include "prodstate/pwl.hpp"
#include "prodstate/rational.hpp"
#include "prodstate/syntax.hpp"

namespace prodstate {

struct Estimate {
  double mean = 0;
  double std_error = 0;
};

// Exact backends answer with a Rational, sampling backends with an Estimate.
using Value = std::variant<Rational, Estimate>;

bool is_exact(const Value& v);
double to_double(const Value& v);
double std_error(const Value& v);
const Rational& exact_value(const Value& v);  // throws std::logic_error on an Estimate
// "p/q" for exact values, 12 significant digits otherwise.
std::string format_value(const Value& v);

// For one-variable states: s(x0^n) = sum_j a_j r_j^n + limit for all n >= start.
struct ChainLaw {
  std::size_t start = 1;
  std::vector<std::pair<Rational, Rational>> terms;  // (a_j, r_j), r_j in (0,1)
  Rational limit;
};

class State {
 public:
  virtual ~State() = default;

  virtual std::size_t arity() const = 0;
  virtual bool is_exact() const = 0;
  // Throws ArityError when f mentions a variable outside the arity.
  virtual Value eval(const Formula& f) const = 0;
  virtual std::string kind() const = 0;

  // Closed form of n -> s(x0^n) when the backend knows it (arity 1 only).
  virtual std::optional<ChainLaw> chain_law() const { return std::nullopt; }

  Rational eval_exact(const Formula& f) const { return exact_value(eval(f)); }
};

using StatePtr = std::shared_ptr<const State>;

// Memo of per-point values, keyed by formula. Shared by the point backends.
class PointEvaluator {
 public:
  explicit PointEvaluator(std::vector<Point> points);

  const std::vector<Point>& points() const { return points_; }
  std::vector<Rational> values(const Formula& f) const;

 private:
  const std::vector<Rational>& values_locked(const Formula& f) const;

  std::vector<Point> points_;
  mutable std::mutex mu_;
  mutable std::unordered_map<Formula, std::vector<Rational>, FormulaHash> cache_;
};

class DiracState : public State {
 public:
  explicit DiracState(Point point);

  const Point& point() const { return eval_.points().front(); }

  std::size_t arity() const override { return arity_; }
  bool is_exact() const override { return true; }
  Value eval(const Formula& f) const override;
  std::string kind() const override { return "dirac"; }
  std::optional<ChainLaw> chain_law() const override;

 private:
  std::size_t arity_;
  PointEvaluator eval_;
};

class MixtureState : public State {
 public:
  // Weights must be positive and sum to exactly 1; every point needs the
  // same arity and coordinates in [0,1]. Throws std::invalid_argument.
  MixtureState(std::vector<Point> points, std::vector<Rational> weights);

  // Skips the weight checks; for deliberately broken maps in tests.
  static std::shared_ptr<MixtureState> unchecked(std::vector<Point> points, std::vector<Rational> weights);

  const std::vector<Point>& points() const { return eval_.points(); }
  const std::vector<Rational>& weights() const { return weights_; }

  std::size_t arity() const override { return arity_; }
  bool is_exact() const override { return true; }
  Value eval(const Formula& f) const override;
  std::string kind() const override { return "mixture"; }
  std::optional<ChainLaw> chain_law() const override;

 private:
  struct Unchecked {};
  MixtureState(Unchecked, std::vector<Point> points, std::vector<Rational> weights);

  std::size_t arity_;
  std::vector<Rational> weights_;
  PointEvaluator eval_;
};

// Laws on [0,1]^n for the sampler.
struct SamplerLaw {
  enum class Kind { Uniform, ProductBeta, AtomMix };
  struct Component {
    Rational weight;
    std::shared_ptr<SamplerLaw> law;  // set for a continuous component
    std::optional<Point> atom;        // set for a point atom
  };

  Kind kind = Kind::Uniform;
  std::vector<std::pair<double, double>> beta;  // per-axis (alpha, beta)
  std::vector<Component> components;            // AtomMix only

  static SamplerLaw uniform() { return {}; }
  static SamplerLaw product_beta(std::vector<std::pair<double, double>> params);
  static SamplerLaw atom_mix(std::vector<Component> components);
};

class SamplerState : public State {
 public:
  SamplerState(std::size_t arity, SamplerLaw law, std::size_t n_samples, std::uint64_t seed);

  const SamplerLaw& law() const { return law_; }
  std::size_t samples() const { return n_; }
  std::uint64_t seed() const { return seed_; }

  std::size_t arity() const override { return arity_; }
  bool is_exact() const override { return false; }
  Value eval(const Formula& f) const override;
  std::string kind() const override { return "sampler"; }

 private:
  std::size_t arity_;
  SamplerLaw law_;
  std::size_t n_;
  std::uint64_t seed_;
};

// Any map on formulas. Nothing about it is checked.
class FunctionState : public State {
 public:
  using Fn = std::function<Value(const Formula&)>;

  FunctionState(std::size_t arity, bool exact, Fn fn, std::string kind = "function");

  std::size_t arity() const override { return arity_; }
  bool is_exact() const override { return exact_; }
  Value eval(const Formula& f) const override;
  std::string kind() const override { return kind_; }

 private:
  std::size_t arity_;
  bool exact_;
  Fn fn_;
  std::string kind_;
};

// ------------------------------------------------------------------ checks

enum Axiom : unsigned { S1 = 1, S2 = 2, S3 = 4, S4 = 8, AllAxioms = 15 };

struct Violation {
  std::string axiom;
  std::string detail;
};

struct Report {
  std::size_t checks = 0;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(const std::string& axiom) const;
  std::size_t count(const std::string& axiom) const;
};

// S1 on the constants, S2 on all pairs, S3 on pairs with implies(f,g), S4 on
// every f that is not the zero function. Exact states are checked with
// equality; approximate ones within tol plus three standard errors.
Report check_state_axioms(const State& s, const std::vector<Formula>& formulas, double tol = 0,
                          unsigned axioms = AllAxioms);

// For each f and cell eps with f & p_eps not zero: s(f & p_eps) = 0 must
// force s(p_eps) = 0.
Report check_s4_prime(const State& s, const std::vector<Formula>& formulas, double tol = 0);

// Boolean additivity over the atoms, disjoint joins, covering meets and
// s(~f) + s(~~f) = 1.
Report derived_identities(const State& s, const Formula& f, const Formula& g, double tol = 0);

// sum_i c_i s(f_i & p_eps) / s(p_eps) over the normalized combination; 0 for
// an empty sum.
Value tau_epsilon(const State& s, const CellIndex& eps, const LinearCombination& c);

// sum over eps of s(f & p_eps).
Value cell_decomposition_eval(const State& s, const Formula& f);

}  // namespace prodstate
