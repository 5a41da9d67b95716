#include <doctest.h>

#include <algorithm>

#include "prodstate/modal.hpp"
#include "prodstate/random.hpp"
#include "support/oracle.hpp"
#include "support/suites.hpp"

using namespace prodstate;

namespace {

using M = ModalFormula;

Formula x(std::size_t i) { return Formula::var(i); }
Rational q(long a, long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

// sigma(x0) = a, sigma(x1) = b; nothing else is asked of it
std::shared_ptr<FunctionState> two_values(const Rational& a, const Rational& b) {
  return std::make_shared<FunctionState>(2, true, [a, b](const Formula& f) -> Value {
    return f.op() == Op::Var && f.var_index() == 0 ? a : b;
  });
}

SatProblem problem(std::size_t n, std::vector<const char*> gamma, const char* target = nullptr) {
  SatProblem p;
  p.arity = n;
  for (auto g : gamma) p.gamma.push_back(parse_modal(g, n));
  if (target) p.target = parse_modal(target, n);
  return p;
}

ModalFormula random_modal(Rng& rng, std::size_t n, int depth) {
  std::uniform_int_distribution<int> pick(0, 7);
  int r = depth == 0 ? 0 : pick(rng);
  switch (r) {
    case 0:
    case 1: return M::atom(random_formula(rng, {n, 3, 0.3}));
    case 2: return M::lneg(random_modal(rng, n, depth - 1));
    case 3: return M::delta(random_modal(rng, n, depth - 1));
    case 4: return M::oplus(random_modal(rng, n, depth - 1), random_modal(rng, n, depth - 1));
    case 5: return M::ominus(random_modal(rng, n, depth - 1), random_modal(rng, n, depth - 1));
    default: return M::limpl(random_modal(rng, n, depth - 1), random_modal(rng, n, depth - 1));
  }
}

}  // namespace

TEST_SUITE("modal") {
  TEST_CASE("truth functions on a grid") {
    for (long i = 0; i <= 100; ++i) {
      for (long j = 0; j <= 100; ++j) {
        Rational a = q(i, 100), b = q(j, 100);
        Rational sum = a + b, diff = a - b;
        CHECK(luk_oplus(a, b) == (sum > 1 ? Rational(1) : sum));
        CHECK(luk_ominus(a, b) == (diff < 0 ? Rational(0) : diff));
        CHECK(luk_oplus(a, b) == 1 - luk_ominus(1 - a, b));
        CHECK(luk_impl(a, b) == luk_oplus(1 - a, b));
        CHECK(luk_neg(a) == 1 - a);
        CHECK(luk_delta(a) == (i == 100 ? 1 : 0));
      }
    }
  }

  TEST_CASE("derived connectives desugar correctly") {
    M pa = M::atom(x(0)), pb = M::atom(x(1));
    for (long i = 0; i <= 100; i += 1) {
      for (long j = 0; j <= 100; j += 3) {
        Rational a = q(i, 100), b = q(j, 100);
        auto s = two_values(a, b);
        Rational sum = a + b, diff = a - b, gap = abs(diff);
        CHECK(exact_value(eval_modal(*s, M::oplus(pa, pb))) == (sum > 1 ? Rational(1) : sum));
        CHECK(exact_value(eval_modal(*s, M::ominus(pa, pb))) == (diff < 0 ? Rational(0) : diff));
        CHECK(exact_value(eval_modal(*s, M::lequiv(pa, pb))) == 1 - gap);
        CHECK(exact_value(eval_modal(*s, M::delta(M::limpl(pa, pb)))) == (a <= b ? 1 : 0));
      }
    }
  }

  TEST_CASE("eval_modal examples") {
    MixtureState m({{0}, {q(1, 2)}}, {q(2, 5), q(3, 5)});
    CHECK(exact_value(eval_modal(m, parse_modal("P(~x0) (+) P(~~x0)", 1))) == 1);
    CHECK(exact_value(eval_modal(DiracState({q(3, 10)}), parse_modal("D(P(x0))", 1))) == 0);
    CHECK(exact_value(eval_modal(m, parse_modal("P(1)", 1))) == 1);
    CHECK(exact_value(eval_modal(DiracState({q(1, 5)}), parse_modal("P(1)", 1))) == 1);
    CHECK_THROWS_AS(eval_modal(m, parse_modal("P(x1)", 2)), ArityError);
  }

  TEST_CASE("sampler states evaluate approximately") {
    SamplerState s(1, SamplerLaw::uniform(), 50000, 2);
    Value v = eval_modal(s, parse_modal("P(x0) (+) P(x0)", 1));
    CHECK_FALSE(is_exact(v));
    CHECK(to_double(v) == doctest::Approx(1.0).epsilon(0.02));
    Value w = eval_modal(s, parse_modal("!P(x0^2)", 1));
    CHECK(std::fabs(to_double(w) - 2.0 / 3) <= 3 * std_error(w) + 1e-12);
  }

  TEST_CASE("axiom_instances examples") {
    auto names = [](const std::vector<AxiomInstance>& v) {
      std::vector<std::string> out;
      for (const auto& a : v) out.push_back(a.name);
      return out;
    };
    auto has = [&](const std::vector<AxiomInstance>& v, const char* n) {
      auto ns = names(v);
      return std::find(ns.begin(), ns.end(), n) != ns.end();
    };
    auto a = axiom_instances(parse_product("x0^2", 1), x(0), 1);
    CHECK(has(a, "P3"));
    CHECK(has(a, "P1a"));
    CHECK(has(a, "P1b"));
    auto b = axiom_instances(parse_product("x0 & ~x0", 1), x(0), 1);
    CHECK_FALSE(has(b, "P4"));
    auto c = axiom_instances(x(0), parse_product("~x0", 1), 1);
    CHECK_FALSE(has(c, "P3"));
    CHECK(has(c, "P4"));
    auto p2 = std::find_if(c.begin(), c.end(), [](const AxiomInstance& i) { return i.name == "P2"; });
    REQUIRE(p2 != c.end());
    CHECK(p2->formula == parse_modal("P(x0 | ~x0) <=> P(x0) (+) (P(~x0) (-) P(x0 & ~x0))", 1));
  }

  TEST_CASE("check_soundness examples") {
    Rng rng(41);
    DiracState d({q(1, 2)});
    for (int k = 0; k < 20; ++k) {
      auto inst = axiom_instances(random_formula(rng, {1, 4, 0.3}), random_formula(rng, {1, 4, 0.3}), 1);
      CHECK(check_soundness(d, inst).ok());
    }
    MixtureState m({{0}, {q(1, 2)}}, {q(2, 5), q(3, 5)});
    auto inst = axiom_instances(x(0), parse_product("~x0", 1), 1);
    for (const auto& i : inst)
      if (i.name == "P2") CHECK(exact_value(eval_modal(m, i.formula)) == 1);
    auto bad = MixtureState::unchecked({{q(1, 2)}}, {q(9, 10)});
    auto rep = check_soundness(*bad, inst);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.violations.front().name == "P1a");
  }

  TEST_CASE("soundness on random mixtures") {
    Rng rng(42);
    for (int k = 0; k < 15; ++k) {
      std::size_t n = 1 + k % 2;
      auto s = suites::random_mixture(rng, n, 4);
      for (int j = 0; j < 10; ++j) {
        Formula phi = random_formula(rng, {n, 4, 0.3});
        Formula psi = j % 2 ? Formula::join(phi, random_formula(rng, {n, 3, 0.3})) : random_formula(rng, {n, 4, 0.3});
        auto rep = check_soundness(*s, axiom_instances(phi, psi, n));
        CHECK_MESSAGE(rep.ok(), (rep.ok() ? "" : rep.violations.front().formula));
      }
    }
  }

  TEST_CASE("sat_search examples") {
    auto r1 = sat_search(problem(1, {"P(x0) <=> !P(x0)"}));
    REQUIRE(r1.sat);
    CHECK(r1.verified);
    CHECK(r1.witness->eval_exact(x(0)) == q(1, 2));

    auto r2 = sat_search(problem(1, {"D(P(~x0))"}));
    REQUIRE(r2.sat);
    CHECK(r2.witness->eval_exact(parse_product("~x0", 1)) == 1);
    for (const auto& p : r2.witness->points()) CHECK(p[0] == 0);

    auto r3 = sat_search(problem(1, {"D(!P(x0))", "D(P(~~x0))"}));
    CHECK_FALSE(r3.sat);
    CHECK(r3.witness == nullptr);
    CHECK(r3.diagnostics.supports_tried > 1);
  }

  TEST_CASE("entails examples") {
    auto e1 = entails(problem(1, {}, "P(x0 | ~x0) <=> P(x0) (+) (P(~x0) (-) P(x0 & ~x0))"));
    CHECK(e1.holds_on_budget);

    auto e2 = entails(problem(1, {}, "P(x0) (+) P(~x0)"));
    REQUIRE_FALSE(e2.holds_on_budget);
    const auto& w = *e2.search.witness;
    CHECK(oracle::eval_modal(w, parse_modal("P(x0) (+) P(~x0)", 1)) <= q(99, 100));
    REQUIRE(e2.search.trace.size() == 1);
    CHECK(e2.search.trace[0].role == "target");

    auto e3 = entails(problem(1, {"D(P(x0))"}, "P(x0^2)"));
    CHECK(e3.holds_on_budget);

    CHECK_THROWS_AS(entails(problem(1, {"P(x0)"})), std::invalid_argument);
  }

  TEST_CASE("witnesses re-verify independently") {
    Rng rng(43);
    int found = 0;
    for (int k = 0; k < 40; ++k) {
      std::size_t n = 1 + k % 2;
      SatProblem p;
      p.arity = n;
      p.budget.samples = 40;
      p.budget.seed = k;
      p.gamma.push_back(random_modal(rng, n, 2));
      if (k % 2) p.gamma.push_back(random_modal(rng, n, 2));
      if (k % 3 == 0) p.target = random_modal(rng, n, 2);
      SatResult r = sat_search(p);
      if (!r.sat) continue;
      ++found;
      REQUIRE(r.witness);
      Rational total = 0;
      for (const auto& w : r.witness->weights()) {
        CHECK(w > 0);
        total += w;
      }
      CHECK(total == 1);
      for (const auto& g : p.gamma) CHECK(oracle::eval_modal(*r.witness, g) == 1);
      if (p.target) CHECK(oracle::eval_modal(*r.witness, *p.target) <= 1 - p.budget.delta);
      for (const auto& line : r.trace) CHECK(line.value >= 0);
    }
    CHECK(found > 5);
  }

  TEST_CASE("every Delta pattern is examined on exhausted searches") {
    auto p = problem(1, {"D(!P(x0))", "D(P(~~x0))", "D(P(x0^2)) (+) D(P(~x0))"});
    p.budget.samples = 30;
    auto r = sat_search(p);
    REQUIRE_FALSE(r.sat);
    const auto& d = r.diagnostics;
    CHECK(d.delta_subformulas == 4);
    CHECK(d.events == 4);
    CHECK(d.support_size == 10);
    CHECK(d.supports_tried == 1 + 3);
    CHECK(d.patterns_examined == d.supports_tried * 16);
  }

  TEST_CASE("search is deterministic") {
    auto p = problem(2, {"P(x0 -> x1) <=> !P(x1)", "!D(P(x0))"});
    p.budget.seed = 5;
    auto a = sat_search(p), b = sat_search(p);
    REQUIRE(a.sat == b.sat);
    if (a.sat) {
      CHECK(a.witness->points() == b.witness->points());
      CHECK(a.witness->weights() == b.witness->weights());
    }
  }

  TEST_CASE("extract_events") {
    auto p = problem(1, {"P(x0) (+) P(~x0)", "D(P(x0))"}, "P(x0^2)");
    auto ev = extract_events(p);
    REQUIRE(ev.size() == 3);
    CHECK(ev[0] == x(0));
    CHECK(ev[2] == parse_product("x0^2", 1));
  }

  TEST_CASE("bad budgets are rejected") {
    auto p = problem(1, {"P(x0)"});
    p.budget.delta = 0;
    CHECK_THROWS_AS(sat_search(p), std::invalid_argument);
    p.budget.delta = q(1, 100);
    p.budget.support = 0;
    CHECK_THROWS_AS(sat_search(p), std::invalid_argument);
  }
}
