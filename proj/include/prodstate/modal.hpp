#pragma once

// The two-tiered logic FP(Pi, L_Delta): product-logic events under a
// probability modality P, combined with Lukasiewicz connectives and Delta.
//
// Semantics, axiom instances, and a sound but incomplete countermodel search
// over finitely supported mixtures of points.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "prodstate/rational.hpp"
#include "prodstate/states.hpp"
#include "prodstate/syntax.hpp"

namespace prodstate {

// Standard truth functions on [0,1].
Rational luk_neg(const Rational& x);
Rational luk_impl(const Rational& x, const Rational& y);
Rational luk_oplus(const Rational& x, const Rational& y);
Rational luk_ominus(const Rational& x, const Rational& y);
Rational luk_delta(const Rational& x);

// P(phi) is read as sigma(phi). Exact when sigma is; for sampling states the
// reported error is a first-order bound that ignores Delta jumps.
Value eval_modal(const State& sigma, const ModalFormula& f);

struct AxiomInstance {
  std::string name;  // P1a, P1b, P2, P3, P4
  ModalFormula formula;
};

// P1 and P2 always; P3 when phi -> psi is a product tautology; P4 when ~phi
// is not.
std::vector<AxiomInstance> axiom_instances(const Formula& phi, const Formula& psi, std::size_t n);

struct SoundnessViolation {
  std::string name;
  std::string formula;
  std::string value;
};

struct SoundnessReport {
  std::size_t checked = 0;
  std::vector<SoundnessViolation> violations;
  bool ok() const { return violations.empty(); }
};

SoundnessReport check_soundness(const State& sigma, const std::vector<AxiomInstance>& instances, double tol = 0);

struct SatBudget {
  std::optional<std::size_t> support;  // random support size; default 2k+2
  std::size_t samples = 200;           // random points drawn in total
  Rational delta = Rational(1, 100);   // slack for strict conditions
  std::uint64_t seed = 0;
};

struct SatProblem {
  std::size_t arity = 1;
  std::vector<ModalFormula> gamma;
  std::optional<ModalFormula> target;
  SatBudget budget;
};

// Distinct P-payloads of gamma and target, in first-occurrence order.
std::vector<Formula> extract_events(const SatProblem& p);

struct SatDiagnostics {
  std::size_t events = 0;
  std::size_t delta_subformulas = 0;
  std::size_t supports_tried = 0;
  std::size_t support_size = 0;      // size of the random supports
  std::size_t patterns_examined = 0; // (support, Delta pattern) pairs
  std::size_t case_leaves = 0;       // truncation cases across all patterns
  std::size_t lp_calls = 0;
};

struct TraceLine {
  std::string role;  // premise or target
  std::string formula;
  Rational value;
};

struct SatResult {
  bool sat = false;
  std::shared_ptr<const MixtureState> witness;
  bool verified = false;
  std::vector<TraceLine> trace;
  SatDiagnostics diagnostics;
};

// Searches for a mixture sigma with every premise at 1 and, when a target is
// present, the target at most 1 - delta. Witnesses are re-checked exactly.
SatResult sat_search(const SatProblem& p);

struct EntailResult {
  bool holds_on_budget = true;  // false means a countermodel was found
  SatResult search;
};

// Throws std::invalid_argument when the problem has no target.
EntailResult entails(const SatProblem& p);

}  // namespace prodstate
