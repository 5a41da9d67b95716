#include "prodstate/random.hpp"

#include <algorithm>

namespace prodstate {

namespace {

Formula leaf(Rng& rng, std::size_t arity) {
  std::uniform_int_distribution<int> pick(0, 19);
  int r = pick(rng);
  if (r == 0) return Formula::bot();
  if (r == 1) return Formula::top();
  std::uniform_int_distribution<std::size_t> var(0, arity - 1);
  return Formula::var(var(rng));
}

Formula grow(Rng& rng, const FormulaShape& shape, std::size_t budget, bool root) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (budget == 0 || (!root && coin(rng) < shape.leaf_bias)) return leaf(rng, shape.arity);
  double r = coin(rng);
  if (r < 0.15) return Formula::neg(grow(rng, shape, budget - 1, false));
  if (r < 0.20 && budget >= 2) return Formula::pow(grow(rng, shape, budget - 2, false), 3);
  if (r < 0.25) return Formula::pow(grow(rng, shape, budget - 1, false), 2);
  Formula a = grow(rng, shape, budget - 1, false);
  Formula b = grow(rng, shape, budget - 1, false);
  double s = coin(rng);
  if (s < 0.25) return Formula::conj(a, b);
  if (s < 0.55) return Formula::impl(a, b);
  if (s < 0.78) return Formula::meet(a, b);
  return Formula::join(a, b);
}

}  // namespace

Formula random_formula(Rng& rng, const FormulaShape& shape) {
  return grow(rng, shape, shape.max_depth, true);
}

std::vector<Formula> random_formulas(Rng& rng, const FormulaShape& shape, std::size_t count) {
  std::vector<Formula> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_formula(rng, shape));
  return out;
}

Rational random_unit_rational(Rng& rng, long denominator) {
  std::uniform_int_distribution<int> special(0, 9);
  int s = special(rng);
  if (s == 0) return 0;
  if (s == 1) return 1;
  std::uniform_int_distribution<long> num(1, denominator);
  Rational r(num(rng), denominator);
  r.canonicalize();
  return r;
}

Point random_point(Rng& rng, std::size_t n, long denominator) {
  Point p(n);
  for (auto& c : p) c = random_unit_rational(rng, denominator);
  return p;
}

Point random_cell_point(Rng& rng, const CellIndex& eps, long denominator) {
  std::uniform_int_distribution<long> num(1, denominator);
  Point p(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (eps.positive(i)) {
      p[i] = Rational(num(rng), denominator);
      p[i].canonicalize();
    } else {
      p[i] = 0;
    }
  }
  return p;
}

std::vector<Rational> random_weights(Rng& rng, std::size_t k, long granularity) {
  // k positive integer parts summing to `total`, divided by total.
  long total = std::max<long>(granularity, static_cast<long>(k));
  std::vector<long> cuts;
  std::uniform_int_distribution<long> pick(1, total - 1);
  while (cuts.size() + 1 < k) {
    long c = pick(rng);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<Rational> w;
  long prev = 0;
  for (long c : cuts) {
    w.emplace_back(c - prev, total);
    prev = c;
  }
  w.emplace_back(total - prev, total);
  for (auto& x : w) x.canonicalize();
  return w;
}

}  // namespace prodstate
