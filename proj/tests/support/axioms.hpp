#pragma once

// Axiom schemes of BL and product logic, instantiated with arbitrary
// formulas.

#include <string>
#include <utility>
#include <vector>

#include "prodstate/random.hpp"
#include "prodstate/syntax.hpp"

namespace axioms {

using prodstate::Formula;

inline std::vector<std::pair<std::string, Formula>> instances(const Formula& a, const Formula& b,
                                                              const Formula& c) {
  using F = Formula;
  auto I = [](const F& l, const F& r) { return F::impl(l, r); };
  auto C = [](const F& l, const F& r) { return F::conj(l, r); };
  auto N = [](const F& l) { return F::neg(l); };
  return {
      {"A1", I(I(a, b), I(I(b, c), I(a, c)))},
      {"A2", I(C(a, b), a)},
      {"A3", I(C(a, b), C(b, a))},
      {"A4", I(C(a, I(a, b)), C(b, I(b, a)))},
      {"A5a", I(I(a, I(b, c)), I(C(a, b), c))},
      {"A5b", I(I(C(a, b), c), I(a, I(b, c)))},
      {"A6", I(I(I(a, b), c), I(I(I(b, a), c), c))},
      {"A7", I(F::bot(), a)},
      {"prelinearity", F::join(I(a, b), I(b, a))},
      {"divisibility-l", I(F::meet(a, b), C(a, I(a, b)))},
      {"divisibility-r", I(C(a, I(a, b)), F::meet(a, b))},
      {"meet-neg", N(F::meet(a, N(a)))},
      {"cancellation", I(N(N(c)), I(I(C(a, c), C(b, c)), I(a, b)))},
  };
}

// 'count' instances with random substitutions of depth <= max_depth.
inline std::vector<std::pair<std::string, Formula>> random_instances(prodstate::Rng& rng, std::size_t n,
                                                                     std::size_t max_depth,
                                                                     std::size_t count) {
  std::vector<std::pair<std::string, Formula>> out;
  prodstate::FormulaShape shape{n, max_depth, 0.3};
  while (out.size() < count) {
    auto a = prodstate::random_formula(rng, shape);
    auto b = prodstate::random_formula(rng, shape);
    auto c = prodstate::random_formula(rng, shape);
    for (auto& inst : instances(a, b, c)) {
      if (out.size() == count) break;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

}  // namespace axioms
