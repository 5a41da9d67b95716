#include <doctest.h>

#include "prodstate/io.hpp"
#include "prodstate/random.hpp"
#include "support/suites.hpp"

using namespace prodstate;

namespace {

Rational q(long a, long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("rationals") {
    CHECK(rational_to_json(q(3, 10)) == json("3/10"));
    CHECK(rational_to_json(Rational(2)) == json("2"));
    CHECK(rational_from_json(json("2/4")) == q(1, 2));
    CHECK(rational_from_json(json(3)) == 3);
    CHECK(rational_from_json(json("0.25")) == q(1, 4));
    CHECK_THROWS_AS(rational_from_json(json("1/0")), FormatError);
    CHECK_THROWS_AS(rational_from_json(json::array()), FormatError);
    CHECK(value_to_json(Value{q(1, 3)}) == json("1/3"));
  }

  TEST_CASE("state documents") {
    auto d = state_from_json(json::parse(R"j({"type":"dirac","point":["1/2"]})j"));
    CHECK(d->kind() == "dirac");
    CHECK(d->eval_exact(parse_product("x0 -> x0^2", 1)) == q(1, 2));

    auto m = state_from_json(json::parse(R"j({"type":"mixture","points":[["0"],["1/2"]],"weights":["2/5","3/5"]})j"));
    CHECK(m->eval_exact(Formula::var(0)) == q(3, 10));

    auto s = state_from_json(json::parse(R"j({"type":"sampler","law":"uniform","n":1000,"seed":42})j"));
    CHECK(s->kind() == "sampler");
    CHECK(s->arity() == 1);
    auto s2 = state_from_json(json::parse(R"j({"type":"sampler","law":"uniform","n":1000,"seed":42})j"), 3);
    CHECK(s2->arity() == 3);
    auto b = state_from_json(json::parse(
        R"j({"type":"sampler","law":"product-beta","params":[[2,3],[1,1]],"n":100,"seed":1})j"));
    CHECK(b->arity() == 2);
    auto a = state_from_json(json::parse(
        R"j({"type":"sampler","law":"atom-mix","components":[{"weight":"1/2","law":"uniform"},{"weight":"1/2","point":["0"]}],"n":100,"seed":1})j"));
    CHECK(a->arity() == 1);
  }

  TEST_CASE("bad state documents") {
    CHECK_THROWS_AS(state_from_json(json::parse(R"j({"type":"nope"})j")), FormatError);
    CHECK_THROWS_AS(state_from_json(json::parse(R"j({"type":"dirac"})j")), FormatError);
    CHECK_THROWS_AS(state_from_json(json::parse(R"j({"type":"mixture","points":[["0"]],"weights":["1/2"]})j")),
                    std::invalid_argument);
    CHECK_THROWS_AS(state_from_json(json::parse(R"j({"type":"dirac","point":["3/2"]})j")), std::invalid_argument);
  }

  TEST_CASE("states round trip") {
    Rng rng(51);
    for (int k = 0; k < 20; ++k) {
      auto s = suites::random_mixture(rng, 1 + k % 3, 4);
      auto back = state_from_json(state_to_json(*s));
      for (const auto& f : random_formulas(rng, {s->arity(), 4, 0.3}, 10)) CHECK(back->eval_exact(f) == s->eval_exact(f));
    }
    SamplerState u(2, SamplerLaw::product_beta({{2, 3}, {1, 4}}), 500, 9);
    auto back = state_from_json(state_to_json(u));
    CHECK(to_double(back->eval(Formula::var(1))) == to_double(u.eval(Formula::var(1))));
  }

  TEST_CASE("distributions") {
    auto j = json::parse(R"j({"neg":"0","nn":"1/2","prefix":[],"tails":[{"c":"1/2","r":"1/2"}],"limit":"0"})j");
    SpectrumDist d = dist_from_json(j);
    CHECK(d == dist_from_state(DiracState({q(1, 2)})).dist);
    CHECK(dist_to_json(d) == j);
    Rng rng(52);
    for (int k = 0; k < 20; ++k) {
      SpectrumDist r = suites::random_dist(rng);
      CHECK(dist_from_json(dist_to_json(r)) == r);
    }
    CHECK_THROWS_AS(dist_from_json(json::parse(R"j({"neg":"1"})j")), FormatError);
  }

  TEST_CASE("problems") {
    auto p = problem_from_json(json::parse(
        R"j({"arity":1,"gamma":["D(P(~x0))"],"target":"P(x0)","budget":{"support":6,"samples":200,"delta":"1/100","seed":7}})j"));
    CHECK(p.arity == 1);
    REQUIRE(p.gamma.size() == 1);
    CHECK(p.gamma[0] == parse_modal("D(P(~x0))", 1));
    REQUIRE(p.target.has_value());
    CHECK(*p.budget.support == 6);
    CHECK(p.budget.samples == 200);
    CHECK(p.budget.delta == q(1, 100));
    CHECK(p.budget.seed == 7);

    auto d = problem_from_json(json::parse(R"j({"arity":2,"gamma":["P(x1)"]})j"));
    CHECK_FALSE(d.budget.support.has_value());
    CHECK_FALSE(d.target.has_value());
    CHECK_THROWS_AS(problem_from_json(json::parse(R"j({"arity":1,"gamma":["P(x1)"]})j")), ParseError);
  }

  TEST_CASE("unreadable files") {
    CHECK_THROWS_AS(read_json_file("/nonexistent/state.json"), std::runtime_error);
  }
}
