#include <doctest.h>

#include "prodstate/random.hpp"
#include "prodstate/semantics.hpp"
#include "prodstate/syntax.hpp"
#include "support/oracle.hpp"

using namespace prodstate;

namespace {

Formula x(std::size_t i) { return Formula::var(i); }

ModalFormula random_modal(Rng& rng, std::size_t n, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  int r = depth == 0 ? pick(rng) % 3 : pick(rng);
  FormulaShape shape{n, 3, 0.3};
  switch (r) {
    case 0: return ModalFormula::atom(random_formula(rng, shape));
    case 1: return ModalFormula::zero();
    case 2: return ModalFormula::one();
    case 3: return ModalFormula::lneg(random_modal(rng, n, depth - 1));
    case 4: return ModalFormula::delta(random_modal(rng, n, depth - 1));
    case 5: return ModalFormula::oplus(random_modal(rng, n, depth - 1), random_modal(rng, n, depth - 1));
    case 6: return ModalFormula::ominus(random_modal(rng, n, depth - 1), random_modal(rng, n, depth - 1));
    case 7: return ModalFormula::lequiv(random_modal(rng, n, depth - 1), random_modal(rng, n, depth - 1));
    default: return ModalFormula::limpl(random_modal(rng, n, depth - 1), random_modal(rng, n, depth - 1));
  }
}

}  // namespace

TEST_SUITE("syntax") {
  TEST_CASE("double negation desugars to nested implications") {
    CHECK(parse_product("~~x0", 1) == Formula::impl(Formula::impl(x(0), Formula::bot()), Formula::bot()));
  }

  TEST_CASE("single connective") { CHECK(parse_product("x0 -> x1", 2) == Formula::impl(x(0), x(1))); }

  TEST_CASE("meet with a negation") {
    CHECK(parse_product("x0 & ~x0", 1) == Formula::meet(x(0), Formula::impl(x(0), Formula::bot())));
  }

  TEST_CASE("powers are left nested products") {
    CHECK(parse_product("x0^3", 1) == Formula::conj(Formula::conj(x(0), x(0)), x(0)));
    CHECK(parse_product("x0^1", 1) == x(0));
    CHECK_THROWS_AS(parse_product("x0^0", 1), ParseError);
  }

  TEST_CASE("constants") {
    CHECK(parse_product("0", 1) == Formula::bot());
    CHECK(parse_product("1", 1) == Formula::top());
  }

  TEST_CASE("modal derived connectives") {
    using M = ModalFormula;
    auto px = M::atom(x(0));
    auto pnx = M::atom(Formula::neg(x(0)));
    CHECK(parse_modal("P(x0) (+) P(~x0)", 1) == M::limpl(M::lneg(px), pnx));
    CHECK(parse_modal("P(x0) (-) P(~x0)", 1) == M::lneg(M::limpl(px, pnx)));
    CHECK(parse_modal("P(x0) <=> P(~x0)", 1) == M::lequiv(px, pnx));
  }

  TEST_CASE("axiom P4 shape") {
    using M = ModalFormula;
    auto expect = M::limpl(M::delta(M::lneg(M::atom(x(0)))),
                           M::lneg(M::atom(Formula::neg(Formula::neg(x(0))))));
    CHECK(parse_modal("D(!P(x0)) => !P(~~x0)", 1) == expect);
  }

  TEST_CASE("nested modality is rejected") {
    try {
      parse_modal("P(P(x0))", 1);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.kind() == ParseError::Kind::NestedModality);
    }
    CHECK_THROWS_AS(parse_modal("P(D(P(x0)))", 1), ParseError);
  }

  TEST_CASE("errors carry kind and position") {
    try {
      parse_product("x0 & x2", 2);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.kind() == ParseError::Kind::UnknownVariable);
      CHECK(e.position() == 5);
    }
    try {
      parse_product("x0 & ", 1);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.kind() == ParseError::Kind::Syntax);
    }
    CHECK_THROWS_AS(parse_product("(x0", 1), ParseError);
    CHECK_THROWS_AS(parse_product("x0 x0", 1), ParseError);
    CHECK_THROWS_AS(parse_product("y0", 1), ParseError);
  }

  TEST_CASE("printing") {
    CHECK(print_formula(Formula::impl(x(0), Formula::bot())) == "~x0");
    CHECK(print_formula(Formula::meet(x(0), x(1))) == "x0 & x1");
    CHECK(print_formula(ModalFormula::atom(x(0))) == "P(x0)");
    CHECK(print_formula(parse_product("(x0 -> x1) -> x2", 3)) == "(x0 -> x1) -> x2");
  }

  TEST_CASE("precedence") {
    CHECK(parse_product("x0 & x1 | x2", 3) == parse_product("(x0 & x1) | x2", 3));
    CHECK(parse_product("x0 * x1 & x2", 3) == parse_product("(x0 * x1) & x2", 3));
    CHECK(parse_product("x0 -> x1 -> x2", 3) == parse_product("x0 -> (x1 -> x2)", 3));
    CHECK(parse_product("x0 | x1 -> x2", 3) == parse_product("(x0 | x1) -> x2", 3));
    CHECK(parse_modal("P(x0) => P(x0) <=> P(x0)", 1) == parse_modal("(P(x0) => P(x0)) <=> P(x0)", 1));

    // and semantically, at grid points
    Formula a = parse_product("x0 & x1 | x2", 3);
    Formula b = Formula::join(Formula::meet(x(0), x(1)), x(2));
    for (const auto& t : oracle::grid(3, 4)) CHECK(oracle::eval_q(a, t) == oracle::eval_q(b, t));
  }

  TEST_CASE("round trip on random formulas") {
    Rng rng(11);
    for (std::size_t n = 1; n <= 3; ++n) {
      for (const auto& f : random_formulas(rng, {n, 6, 0.25}, 300)) {
        std::string s = print_formula(f);
        REQUIRE_MESSAGE(parse_product(s, n) == f, s);
      }
    }
  }

  TEST_CASE("round trip on random modal formulas") {
    Rng rng(12);
    for (int k = 0; k < 300; ++k) {
      ModalFormula m = random_modal(rng, 2, 4);
      std::string s = print_formula(m);
      REQUIRE_MESSAGE(parse_modal(s, 2) == m, s);
    }
  }

  TEST_CASE("structural hashing") {
    Formula a = parse_product("x0 * x1 -> ~x0", 2);
    Formula b = parse_product("(x0 * x1) -> ~x0", 2);
    CHECK(a == b);
    CHECK(a.hash() == b.hash());
    CHECK(a != parse_product("x1 * x0 -> ~x0", 2));
    CHECK(a.min_arity() == 2);
    CHECK_THROWS_AS(require_arity(a, 1), ArityError);
  }
}
