#include <doctest.h>

#include "prodstate/cells.hpp"
#include "prodstate/random.hpp"
#include "prodstate/syntax.hpp"
#include "support/oracle.hpp"

using namespace prodstate;

namespace {

Formula x(std::size_t i) { return Formula::var(i); }

std::vector<std::string> names(const std::vector<CellIndex>& v) {
  std::vector<std::string> out;
  for (const auto& e : v) out.push_back(e.to_string());
  return out;
}

// membership straight from the definition of G_eps
bool member(const Point& t, const CellIndex& e) {
  for (std::size_t i = 0; i < t.size(); ++i)
    if ((e[i] == 2) != (t[i] > 0)) return false;
  return true;
}

}  // namespace

TEST_SUITE("cells") {
  TEST_CASE("enumerate_sigma") {
    CHECK(names(enumerate_sigma(1)) == std::vector<std::string>{"1", "2"});
    CHECK(names(enumerate_sigma(2)) == std::vector<std::string>{"11", "12", "21", "22"});
    auto s3 = enumerate_sigma(3);
    CHECK(s3.size() == 8);
    for (std::size_t i = 1; i < s3.size(); ++i) CHECK(s3[i - 1] < s3[i]);
    for (std::size_t i = 0; i < s3.size(); ++i) {
      CHECK(s3[i].ordinal() == i);
      CHECK(CellIndex::from_ordinal(3, i) == s3[i]);
      CHECK(CellIndex::from_string(s3[i].to_string()) == s3[i]);
    }
  }

  TEST_CASE("atom_formula") {
    Formula nn1 = Formula::neg(Formula::neg(x(1)));
    CHECK(atom_formula(CellIndex::from_string("12")) == Formula::meet(Formula::neg(x(0)), nn1));
    CHECK(atom_formula(CellIndex::from_string("22")) ==
          Formula::meet(Formula::neg(Formula::neg(x(0))), nn1));
    CHECK(atom_formula(CellIndex::from_string("1")) == Formula::neg(x(0)));
  }

  TEST_CASE("cell_of_point") {
    CHECK(cell_of_point(Point{0, Rational(3, 10)}).to_string() == "12");
    CHECK(cell_of_point(Point{Rational(1, 2), Rational(1, 2)}).to_string() == "22");
    CHECK(cell_of_point(Point{0, 0}).to_string() == "11");
    CHECK(cell_of_point(RealPoint{0.0, 0.3}).to_string() == "12");
    CHECK_THROWS_AS(cell_of_point(Point{Rational(3, 2)}), PointError);
    CHECK_THROWS_AS(cell_of_point(RealPoint{-0.1}), PointError);
  }

  TEST_CASE("interior_point") {
    CHECK(interior_point(CellIndex::from_string("22")) == Point{Rational(1, 2), Rational(1, 2)});
    CHECK(interior_point(CellIndex::from_string("11")) == Point{0, 0});
    CHECK(interior_point(CellIndex::from_string("12")) == Point{0, Rational(1, 2)});
    for (const auto& e : enumerate_sigma(3)) {
      Point t = interior_point(e);
      CHECK(cell_of_point(t) == e);
      CHECK(in_slice(t, e, Rational(1, 2)));
      CHECK(in_slice(t, e, Rational(1, 7)));
    }
  }

  TEST_CASE("in_slice") {
    auto e22 = CellIndex::from_string("22");
    Point h{Rational(1, 2), Rational(1, 2)};
    CHECK(in_slice(h, e22, Rational(1, 4)));
    CHECK_FALSE(in_slice(h, e22, Rational(3, 4)));
    CHECK(in_slice(Point{0, 1}, CellIndex::from_string("12"), Rational(1)));
    CHECK_FALSE(in_slice(Point{Rational(1, 5), 1}, CellIndex::from_string("12"), Rational(1, 10)));
    CHECK_THROWS_AS(in_slice(h, e22, Rational(0)), std::invalid_argument);
  }

  TEST_CASE("partition of random points") {
    Rng rng(5);
    for (int k = 0; k < 1000; ++k) {
      std::size_t n = 1 + k % 3;
      Point t = random_point(rng, n, 16);
      CellIndex c = cell_of_point(t);
      int hits = 0;
      for (const auto& e : enumerate_sigma(n)) hits += member(t, e);
      REQUIRE(hits == 1);
      CHECK(member(t, c));
    }
  }

  TEST_CASE("slices are nested") {
    Rng rng(6);
    std::vector<Rational> qs;
    for (long k = 1; k <= 10; ++k) qs.emplace_back(k, 10);
    for (int k = 0; k < 300; ++k) {
      std::size_t n = 1 + k % 3;
      Point t = random_point(rng, n, 10);
      CellIndex e = cell_of_point(t);
      for (const auto& q1 : qs)
        for (const auto& q2 : qs)
          if (q1 >= q2 && in_slice(t, e, q1)) CHECK(in_slice(t, e, q2));
    }
  }

  TEST_CASE("atom semantics on a grid") {
    for (std::size_t n = 1; n <= 3; ++n) {
      auto sigma = enumerate_sigma(n);
      Formula all = atom_formula(sigma.front());
      for (std::size_t i = 1; i < sigma.size(); ++i) all = Formula::join(all, atom_formula(sigma[i]));
      for (const auto& t : oracle::grid(n, 4)) {
        CellIndex c = cell_of_point(t);
        for (const auto& e : sigma) CHECK(oracle::eval_q(atom_formula(e), t) == (c == e ? 1 : 0));
        CHECK(oracle::eval_q(all, t) == 1);
      }
    }
  }

  TEST_CASE("random cell points stay in their cell") {
    Rng rng(7);
    for (const auto& e : enumerate_sigma(3))
      for (int k = 0; k < 50; ++k) CHECK(cell_of_point(random_cell_point(rng, e)) == e);
  }
}
