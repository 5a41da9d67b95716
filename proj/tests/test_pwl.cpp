#include <doctest.h>

#include <cmath>

#include "prodstate/cells.hpp"
#include "prodstate/pwl.hpp"
#include "prodstate/random.hpp"
#include "prodstate/syntax.hpp"
#include "support/axioms.hpp"
#include "support/oracle.hpp"

using namespace prodstate;

namespace {

Formula x(std::size_t i) { return Formula::var(i); }
Formula P(const char* s, std::size_t n) { return parse_product(s, n); }

CellIndex cell(const char* s) { return CellIndex::from_string(s); }

LinForm lf(std::vector<long> a) {
  std::vector<Integer> v;
  for (long c : a) v.emplace_back(c);
  return LinForm(std::move(v));
}

}  // namespace

TEST_SUITE("pwl") {
  TEST_CASE("lower examples") {
    auto neg = lower(P("~x0", 1), 1);
    CHECK(neg.at(cell("1")) == CellFunc::pwl(MinMaxTerm::zero(0)));
    CHECK(neg.at(cell("2")).is_zero());

    auto f = lower(P("x0 -> x0^2", 1), 1);
    CHECK(f.at(cell("1")) == CellFunc::pwl(MinMaxTerm::zero(0)));
    CHECK(f.at(cell("2")) == CellFunc::pwl(MinMaxTerm::form(LinForm::unit(1, 0))));
    // and pointwise: value t on (0,1]
    Rng rng(1);
    for (int k = 0; k < 20; ++k) {
      Point t = random_point(rng, 1, 1000);
      Rational expect = t[0] == 0 ? Rational(1) : t[0];
      CHECK(eval_cellwise(f, t) == expect);
      CHECK(oracle::eval_q(P("x0 -> x0^2", 1), t) == expect);
    }

    auto g = lower(P("x0*x1", 2), 2);
    CHECK(g.at(cell("11")).is_zero());
    CHECK(g.at(cell("12")).is_zero());
    CHECK(g.at(cell("21")).is_zero());
    CHECK(g.at(cell("22")) == CellFunc::pwl(MinMaxTerm::form(lf({1, 1}))));
  }

  TEST_CASE("eval_cellwise examples") {
    CHECK(eval_cellwise(lower(P("x0 -> x1", 2), 2), {Rational(1, 2), Rational(1, 4)}) == Rational(1, 2));
    CHECK(eval_cellwise(lower(P("x0 & ~x0", 1), 1), {Rational(7, 10)}) == 0);
    CHECK(eval_cellwise(lower(P("x0^2", 1), 1), {Rational(1, 2)}) == Rational(1, 4));
    CHECK_THROWS_AS(eval_cellwise(lower(P("x0", 1), 1), {Rational(2)}), PointError);
  }

  TEST_CASE("decision examples") {
    CHECK(is_tautology(P("~~x0 -> ((x1*x0 -> x2*x0) -> (x1 -> x2))", 3), 3));
    CHECK(is_tautology(P("(x0 -> x1) | (x1 -> x0)", 2), 2));
    CHECK_FALSE(is_tautology(P("x0 | ~x0", 1), 1));
    CHECK(implies(P("x0^2", 1), x(0), 1));
    CHECK(is_equivalent(P("~(x0*x0)", 1), P("~x0", 1), 1));
    CHECK_FALSE(implies(x(0), P("x0^2", 1), 1));
    CHECK(is_boolean(P("~x0", 1), 1));
    CHECK_FALSE(is_boolean(x(0), 1));
    CHECK(is_boolean(atom_formula(cell("12")), 2));
    CHECK(is_zero_function(P("x0 & ~x0", 1), 1));
    CHECK_FALSE(is_zero_function(P("~~x0", 1), 1));
  }

  TEST_CASE("equivalence examples agree with the grid") {
    for (const auto& t : oracle::grid(1, 20))
      CHECK(oracle::eval_q(P("~(x0*x0)", 1), t) == oracle::eval_q(P("~x0", 1), t));
  }

  TEST_CASE("normalize_combination") {
    auto e2 = cell("2");
    LinearCombination a;
    a.add(1, x(0)).add(1, x(0));
    auto na = normalize_combination(a, e2);
    REQUIRE(na.terms.size() == 1);
    CHECK(na.terms[0].first == 2);
    CHECK(na.terms[0].second == x(0));

    LinearCombination b;
    b.add(1, x(0)).add(-1, P("x0 | ~x0", 1));
    CHECK(normalize_combination(b, e2).terms.empty());
    // the two restrictions really coincide on the cell
    for (long k = 1; k <= 20; ++k) {
      Point t{Rational(k, 20)};
      t[0].canonicalize();
      CHECK(oracle::eval_q(x(0), t) == oracle::eval_q(P("x0 | ~x0", 1), t));
    }

    LinearCombination c;
    c.add(Rational(1, 2), P("~x0", 1));
    CHECK(normalize_combination(c, e2).terms.empty());

    // on the other cell ~x0 survives
    CHECK(normalize_combination(c, cell("1")).terms.size() == 1);
  }

  TEST_CASE("oracle agreement on random formulas") {
    Rng rng(101);
    for (int k = 0; k < 500; ++k) {
      std::size_t n = 1 + k % 3;
      Formula f = random_formula(rng, {n, 6, 0.25});
      auto F = lower(f, n);
      for (int j = 0; j < 50; ++j) {
        Point t = random_point(rng, n, 60);
        REQUIRE_MESSAGE(eval_cellwise(F, t) == oracle::eval_q(f, t), print_formula(f));
      }
    }
  }

  TEST_CASE("dichotomy per cell") {
    Rng rng(102);
    for (int k = 0; k < 150; ++k) {
      std::size_t n = 1 + k % 3;
      Formula f = random_formula(rng, {n, 5, 0.25});
      auto F = lower(f, n);
      for (const auto& e : enumerate_sigma(n)) {
        const CellFunc& cf = F.at(e);
        Rational w = oracle::eval_q(f, interior_point(e));
        if (cf.is_zero()) {
          CHECK(w == 0);
          for (int j = 0; j < 20; ++j) CHECK(oracle::eval_q(f, random_cell_point(rng, e, 97)) == 0);
        } else {
          CHECK(w > 0);
          for (int j = 0; j < 200; ++j) REQUIRE(oracle::eval_q(f, random_cell_point(rng, e, 97)) > 0);
        }
      }
    }
  }

  TEST_CASE("tautology decisions against sampling") {
    Rng rng(103), orng(104);
    int tauts = 0;
    std::vector<Formula> suite;
    for (int k = 0; k < 250; ++k) suite.push_back(random_formula(rng, {1 + std::size_t(k % 3), 5, 0.25}));
    // implications between random formulas are tautologies far more often
    for (int k = 0; k < 150; ++k) {
      std::size_t n = 1 + k % 3;
      auto a = random_formula(rng, {n, 3, 0.3});
      suite.push_back(Formula::impl(Formula::conj(a, random_formula(rng, {n, 2, 0.3})), a));
      auto b = random_formula(rng, {n, 3, 0.3});
      suite.push_back(Formula::impl(a, Formula::join(a, b)));
    }
    for (const auto& f : suite) {
      std::size_t n = std::max<std::size_t>(1, f.min_arity());
      bool t = is_tautology(f, n);
      tauts += t;
      if (t) {
        CHECK_FALSE_MESSAGE(oracle::find_refutation(f, n, 10, 1000, orng), print_formula(f));
      } else {
        CHECK_MESSAGE(oracle::find_refutation(f, n, 20, 10000, orng), print_formula(f));
      }
    }
    CHECK(tauts > 50);
  }

  TEST_CASE("BL and product axioms") {
    Rng rng(105);
    for (std::size_t n = 1; n <= 3; ++n) {
      Formula a = x(0), b = x(n > 1 ? 1 : 0), c = x(n - 1);
      for (const auto& [name, f] : axioms::instances(a, b, c)) CHECK_MESSAGE(is_tautology(f, n), name);
    }
    for (const auto& [name, f] : axioms::random_instances(rng, 3, 2, 100))
      CHECK_MESSAGE(is_tautology(f, 3), name << ": " << print_formula(f));
    CHECK(is_tautology(P("x0 & ~x0 -> 0", 1), 1));
  }

  TEST_CASE("non-axioms are rejected") {
    CHECK_FALSE(is_tautology(P("x0 -> x0 * x0", 1), 1));
    CHECK_FALSE(is_tautology(P("~~x0 -> x0", 1), 1));
    CHECK_FALSE(is_tautology(P("(x0 -> x1) -> (x1 -> x0)", 2), 2));
  }

  TEST_CASE("terms are nonpositive on the cone") {
    Rng rng(106);
    std::uniform_real_distribution<double> u(-10.0, 0.0);
    for (int k = 0; k < 200; ++k) {
      std::size_t n = 1 + k % 3;
      auto F = lower(random_formula(rng, {n, 6, 0.25}), n);
      for (std::size_t c = 0; c < F.cell_count(); ++c) {
        const CellFunc& cf = F.at_ordinal(c);
        if (cf.is_zero()) continue;
        const MinMaxTerm& t = cf.term();
        for (const auto& br : t.branches()) REQUIRE_FALSE(br.empty());
        for (int j = 0; j < 100; ++j) {
          std::vector<double> pt(t.dims());
          for (auto& v : pt) v = u(rng);
          CHECK(t.value(pt) <= 1e-9);
        }
      }
    }
  }

  TEST_CASE("term algebra") {
    MinMaxTerm a = MinMaxTerm::form(lf({1, 0})), b = MinMaxTerm::form(lf({0, 2}));
    std::vector<double> u{-1.0, -0.25};
    CHECK((a + b).value(u) == doctest::Approx(-1.5));
    CHECK(min(a, b).value(u) == doctest::Approx(-1.0));
    CHECK(max(a, b).value(u) == doctest::Approx(-0.5));
    CHECK(residuum(a, b).value(u) == doctest::Approx(0.0));
    CHECK(residuum(b, a).value(u) == doctest::Approx(-0.5));
    CHECK((-min(a, b)).value(u) == doctest::Approx(1.0));
    CHECK(MinMaxTerm::zero(2).is_identically_zero());
    CHECK_FALSE(a.is_identically_zero());
    // exp_value is the monomial of the active piece
    std::vector<Rational> t{Rational(1, 2), Rational(1, 3)};
    CHECK(min(a, b).exp_value(t) == Rational(1, 9));
    CHECK(max(a, b).exp_value(t) == Rational(1, 2));
    CHECK(lf({2, -1}).dominates(lf({3, -1})));
    CHECK_FALSE(lf({2, -1}).dominates(lf({1, 0})));
  }

  TEST_CASE("arity errors") {
    CHECK_THROWS_AS(lower(x(2), 2), ArityError);
    CHECK_THROWS_AS(is_tautology(x(1), 1), ArityError);
  }
}
