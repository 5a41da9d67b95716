#pragma once

// Exact rational linear programming: a two-phase dense simplex (Bland's
// rule, so it always terminates) and Fourier-Motzkin elimination for small
// inequality systems over free variables.

#include <cstddef>
#include <optional>
#include <vector>

#include "prodstate/rational.hpp"

namespace prodstate::lp {

enum class Sense { Le, Ge, Eq };

struct Row {
  std::vector<Rational> coeffs;
  Sense sense = Sense::Le;
  Rational rhs;
};

// minimize objective . x  subject to rows, x >= 0.
struct Problem {
  std::size_t vars = 0;
  std::vector<Row> rows;
  std::vector<Rational> objective;  // empty means pure feasibility
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  std::vector<Rational> x;
  Rational value;
};

Solution solve(const Problem& problem);

// a . x <= b over free real variables.
struct Inequality {
  std::vector<Integer> a;
  Integer b;
};

// Fourier-Motzkin. Returns nullopt if the intermediate system grows past
// row_cap rows.
std::optional<bool> fm_feasible(std::vector<Inequality> rows, std::size_t dims, std::size_t row_cap = 4000);

// Same question answered by the simplex, splitting each free variable.
bool simplex_feasible(const std::vector<Inequality>& rows, std::size_t dims);

// Fourier-Motzkin for dims <= 4, simplex otherwise or when FM blows up.
bool feasible(const std::vector<Inequality>& rows, std::size_t dims);

}  // namespace prodstate::lp
