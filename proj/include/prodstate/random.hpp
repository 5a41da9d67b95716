#pragma once

// Seeded generators for formulas, points and states used by the randomized
// checks and the CLI's state-check command.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "prodstate/cells.hpp"
#include "prodstate/rational.hpp"
#include "prodstate/syntax.hpp"

namespace prodstate {

using Rng = std::mt19937_64;

struct FormulaShape {
  std::size_t arity = 1;
  std::size_t max_depth = 6;  // of the desugared tree
  double leaf_bias = 0.25;    // chance of stopping early at inner positions
};

Formula random_formula(Rng& rng, const FormulaShape& shape);
std::vector<Formula> random_formulas(Rng& rng, const FormulaShape& shape, std::size_t count);

// Uniform over {0, 1/d, ..., d/d} for the given denominator; zero and one
// appear with extra weight so every cell gets visited.
Rational random_unit_rational(Rng& rng, long denominator = 64);
Point random_point(Rng& rng, std::size_t n, long denominator = 64);
// A point in G_eps: positive coordinates are drawn from (0,1].
Point random_cell_point(Rng& rng, const CellIndex& eps, long denominator = 64);

// Positive weights summing exactly to 1.
std::vector<Rational> random_weights(Rng& rng, std::size_t k, long granularity = 20);

}  // namespace prodstate
