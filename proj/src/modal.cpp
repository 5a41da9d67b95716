#include "prodstate/modal.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <unordered_map>

#include "prodstate/cells.hpp"
#include "prodstate/lp.hpp"
#include "prodstate/pwl.hpp"
#include "prodstate/random.hpp"
#include "prodstate/semantics.hpp"

namespace prodstate {

Rational luk_neg(const Rational& x) { return 1 - x; }
Rational luk_impl(const Rational& x, const Rational& y) { return rational_min(Rational(1), 1 - x + y); }
Rational luk_oplus(const Rational& x, const Rational& y) { return rational_min(Rational(1), x + y); }
Rational luk_ominus(const Rational& x, const Rational& y) { return rational_max(Rational(0), x - y); }
Rational luk_delta(const Rational& x) { return x == 1 ? Rational(1) : Rational(0); }

// -------------------------------------------------------------- semantics

namespace {

void require_modal_arity(const ModalFormula& f, std::size_t n) {
  if (f.min_arity() > n)
    throw ArityError("modal formula uses x" + std::to_string(f.min_arity() - 1) + " but arity is " +
                     std::to_string(n));
}

Rational eval_exact(const State& s, const ModalFormula& f) {
  switch (f.op()) {
    case ModalOp::Zero: return 0;
    case ModalOp::One: return 1;
    case ModalOp::Atom: return s.eval_exact(f.event());
    case ModalOp::LNeg: return luk_neg(eval_exact(s, f.lhs()));
    case ModalOp::LImpl: return luk_impl(eval_exact(s, f.lhs()), eval_exact(s, f.rhs()));
    case ModalOp::Delta: return luk_delta(eval_exact(s, f.lhs()));
  }
  return 0;
}

Estimate eval_approx(const State& s, const ModalFormula& f) {
  switch (f.op()) {
    case ModalOp::Zero: return {0, 0};
    case ModalOp::One: return {1, 0};
    case ModalOp::Atom: {
      Value v = s.eval(f.event());
      return {to_double(v), std_error(v)};
    }
    case ModalOp::LNeg: {
      Estimate a = eval_approx(s, f.lhs());
      return {1 - a.mean, a.std_error};
    }
    case ModalOp::LImpl: {
      Estimate a = eval_approx(s, f.lhs()), b = eval_approx(s, f.rhs());
      return {std::min(1.0, 1 - a.mean + b.mean), a.std_error + b.std_error};
    }
    case ModalOp::Delta: {
      Estimate a = eval_approx(s, f.lhs());
      return {a.mean >= 1 ? 1.0 : 0.0, 0};
    }
  }
  return {};
}

}  // namespace

Value eval_modal(const State& sigma, const ModalFormula& f) {
  require_modal_arity(f, sigma.arity());
  if (sigma.is_exact()) return eval_exact(sigma, f);
  return eval_approx(sigma, f);
}

// ----------------------------------------------------------------- axioms

std::vector<AxiomInstance> axiom_instances(const Formula& phi, const Formula& psi, std::size_t n) {
  require_arity(phi, n);
  require_arity(psi, n);
  using M = ModalFormula;
  std::vector<AxiomInstance> out;
  out.push_back({"P1a", M::atom(Formula::top())});
  out.push_back({"P1b", M::lneg(M::atom(Formula::bot()))});
  out.push_back({"P2", M::lequiv(M::atom(Formula::join(phi, psi)),
                                 M::oplus(M::atom(phi), M::ominus(M::atom(psi), M::atom(Formula::meet(phi, psi)))))});
  if (implies(phi, psi, n)) out.push_back({"P3", M::limpl(M::atom(phi), M::atom(psi))});
  if (!is_tautology(Formula::neg(phi), n))
    out.push_back({"P4", M::limpl(M::delta(M::lneg(M::atom(phi))),
                                  M::lneg(M::atom(Formula::neg(Formula::neg(phi)))))});
  return out;
}

SoundnessReport check_soundness(const State& sigma, const std::vector<AxiomInstance>& instances, double tol) {
  SoundnessReport rep;
  for (const auto& inst : instances) {
    ++rep.checked;
    Value v = eval_modal(sigma, inst.formula);
    bool ok = is_exact(v) ? exact_value(v) == 1 : to_double(v) >= 1 - tol - 3 * std_error(v);
    if (!ok) rep.violations.push_back({inst.name, print_formula(inst.formula), format_value(v)});
  }
  return rep;
}

// ------------------------------------------------------------- sat search

namespace {

// c + sum_i coef_i a_i over the atomic values a_i = sigma(f_i).
struct Affine {
  std::vector<Rational> coef;
  Rational c;

  static Affine constant(std::size_t k, const Rational& v) { return {std::vector<Rational>(k), v}; }
  bool is_constant() const {
    return std::all_of(coef.begin(), coef.end(), [](const Rational& q) { return sgn(q) == 0; });
  }
  Affine operator-(const Affine& o) const {
    Affine r = *this;
    for (std::size_t i = 0; i < coef.size(); ++i) r.coef[i] -= o.coef[i];
    r.c -= o.c;
    return r;
  }
  Affine operator+(const Affine& o) const {
    Affine r = *this;
    for (std::size_t i = 0; i < coef.size(); ++i) r.coef[i] += o.coef[i];
    r.c += o.c;
    return r;
  }
};

// expr <= 0, expr >= 0 or expr = 0
struct Constraint {
  Affine expr;
  lp::Sense sense;
};

struct Case {
  Affine value;
  std::vector<Constraint> cons;
};

constexpr std::size_t kMaxCases = 20000;

class CaseBuilder {
 public:
  CaseBuilder(const std::vector<Formula>& events, const std::vector<ModalFormula>& deltas, const Rational& delta)
      : events_(events), deltas_(deltas), delta_(delta) {}

  void set_pattern(std::size_t bits) { pattern_ = bits; }

  std::vector<Case> expand(const ModalFormula& f) const {
    const std::size_t k = events_.size();
    switch (f.op()) {
      case ModalOp::Zero: return {{Affine::constant(k, 0), {}}};
      case ModalOp::One: return {{Affine::constant(k, 1), {}}};
      case ModalOp::Atom: {
        Affine a = Affine::constant(k, 0);
        a.coef[event_index(f.event())] = 1;
        return {{a, {}}};
      }
      case ModalOp::LNeg: {
        auto cs = expand(f.lhs());
        for (auto& c : cs) c.value = Affine::constant(k, 1) - c.value;
        return cs;
      }
      case ModalOp::Delta: {
        bool on = (pattern_ >> delta_index(f)) & 1U;
        std::vector<Case> out;
        for (auto& c : expand(f.lhs())) {
          Case d{Affine::constant(k, on ? 1 : 0), c.cons};
          if (on)
            add(d.cons, c.value - Affine::constant(k, 1), lp::Sense::Ge);  // arg = 1
          else
            add(d.cons, c.value - Affine::constant(k, 1 - delta_), lp::Sense::Le);  // arg < 1
          out.push_back(std::move(d));
        }
        return prune(std::move(out));
      }
      case ModalOp::LImpl: {
        auto xs = expand(f.lhs());
        auto ys = expand(f.rhs());
        std::vector<Case> out;
        for (const auto& x : xs) {
          for (const auto& y : ys) {
            std::vector<Constraint> both = x.cons;
            both.insert(both.end(), y.cons.begin(), y.cons.end());
            Affine diff = x.value - y.value;
            Case a{Affine::constant(k, 1), both};  // x <= y
            add(a.cons, diff, lp::Sense::Le);
            out.push_back(std::move(a));
            Case b{Affine::constant(k, 1) - diff, std::move(both)};  // x >= y
            add(b.cons, diff, lp::Sense::Ge);
            out.push_back(std::move(b));
            if (out.size() > kMaxCases) throw std::runtime_error("truncation case budget exceeded");
          }
        }
        return prune(std::move(out));
      }
    }
    return {};
  }

  // Marker for a constant constraint that can never hold.
  static bool dead(const std::vector<Constraint>& cons) {
    return !cons.empty() && cons.back().expr.coef.empty();
  }

  // Appends expr (sense) 0 unless it is a constant; a false constant makes
  // the list dead.
  static void add(std::vector<Constraint>& cons, const Affine& expr, lp::Sense sense) {
    if (dead(cons)) return;
    if (expr.is_constant()) {
      int s = sgn(expr.c);
      bool holds = sense == lp::Sense::Le ? s <= 0 : sense == lp::Sense::Ge ? s >= 0 : s == 0;
      if (!holds) cons.push_back({Affine{{}, 0}, lp::Sense::Eq});
      return;
    }
    cons.push_back({expr, sense});
  }

  static std::vector<Case> prune(std::vector<Case> cs) {
    cs.erase(std::remove_if(cs.begin(), cs.end(), [](const Case& c) { return dead(c.cons); }), cs.end());
    return cs;
  }

 private:

  std::size_t event_index(const Formula& f) const {
    for (std::size_t i = 0; i < events_.size(); ++i)
      if (events_[i] == f) return i;
    throw std::logic_error("event not extracted");
  }
  std::size_t delta_index(const ModalFormula& f) const {
    for (std::size_t i = 0; i < deltas_.size(); ++i)
      if (deltas_[i] == f) return i;
    throw std::logic_error("Delta subformula not extracted");
  }

  const std::vector<Formula>& events_;
  const std::vector<ModalFormula>& deltas_;
  Rational delta_;
  std::size_t pattern_ = 0;
};

void collect(const ModalFormula& f, std::vector<Formula>& events, std::vector<ModalFormula>& deltas) {
  switch (f.op()) {
    case ModalOp::Zero:
    case ModalOp::One:
      return;
    case ModalOp::Atom:
      if (std::find(events.begin(), events.end(), f.event()) == events.end()) events.push_back(f.event());
      return;
    case ModalOp::Delta:
      collect(f.lhs(), events, deltas);
      if (std::find(deltas.begin(), deltas.end(), f) == deltas.end()) deltas.push_back(f);
      return;
    case ModalOp::LNeg:
      collect(f.lhs(), events, deltas);
      return;
    case ModalOp::LImpl:
      collect(f.lhs(), events, deltas);
      collect(f.rhs(), events, deltas);
      return;
  }
}

// Conjunction of per-formula case lists.
std::vector<std::vector<Constraint>> combine(const std::vector<std::vector<Case>>& per_formula) {
  std::vector<std::vector<Constraint>> acc{{}};
  for (const auto& cases : per_formula) {
    std::vector<std::vector<Constraint>> next;
    for (const auto& prefix : acc) {
      for (const auto& c : cases) {
        auto cons = prefix;
        cons.insert(cons.end(), c.cons.begin(), c.cons.end());
        next.push_back(std::move(cons));
        if (next.size() > kMaxCases) throw std::runtime_error("truncation case budget exceeded");
      }
    }
    acc = std::move(next);
  }
  return acc;
}

// Feasibility in the atomic values alone, 0 <= a <= 1.
bool abstract_feasible(const std::vector<Constraint>& cons, std::size_t k) {
  lp::Problem p;
  p.vars = k;
  for (std::size_t i = 0; i < k; ++i) {
    lp::Row r{std::vector<Rational>(k), lp::Sense::Le, 1};
    r.coeffs[i] = 1;
    p.rows.push_back(std::move(r));
  }
  for (const auto& c : cons) p.rows.push_back({c.expr.coef, c.sense, -c.expr.c});
  return lp::solve(p).status != lp::Status::Infeasible;
}

// Weights on the support realizing the constraints.
std::optional<std::vector<Rational>> weights_for(const std::vector<Constraint>& cons,
                                                 const std::vector<std::vector<Rational>>& table) {
  const std::size_t m = table.empty() ? 0 : table.front().size();
  lp::Problem p;
  p.vars = m;
  p.rows.push_back({std::vector<Rational>(m, Rational(1)), lp::Sense::Eq, 1});
  for (const auto& c : cons) {
    std::vector<Rational> row(m);
    for (std::size_t i = 0; i < c.expr.coef.size(); ++i) {
      if (sgn(c.expr.coef[i]) == 0) continue;
      for (std::size_t j = 0; j < m; ++j) row[j] += c.expr.coef[i] * table[i][j];
    }
    p.rows.push_back({std::move(row), c.sense, -c.expr.c});
  }
  auto sol = lp::solve(p);
  if (sol.status == lp::Status::Infeasible) return std::nullopt;
  return sol.x;
}

std::vector<Point> structured_support(std::size_t n) {
  long den = n <= 3 ? 4 : n <= 5 ? 2 : 0;
  std::vector<Point> pts;
  if (den > 0) {
    std::size_t per = static_cast<std::size_t>(den) + 1, total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= per;
    for (std::size_t o = 0; o < total; ++o) {
      Point p(n);
      std::size_t r = o;
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = Rational(static_cast<long>(r % per), den);
        p[i].canonicalize();
        r /= per;
      }
      pts.push_back(std::move(p));
    }
  }
  for (const auto& eps : enumerate_sigma(n)) {
    Point ip = interior_point(eps);
    if (std::find(pts.begin(), pts.end(), ip) == pts.end()) pts.push_back(std::move(ip));
  }
  return pts;
}

}  // namespace

std::vector<Formula> extract_events(const SatProblem& p) {
  std::vector<Formula> events;
  std::vector<ModalFormula> deltas;
  for (const auto& g : p.gamma) collect(g, events, deltas);
  if (p.target) collect(*p.target, events, deltas);
  return events;
}

SatResult sat_search(const SatProblem& p) {
  if (p.arity == 0) throw std::invalid_argument("arity must be at least 1");
  if (sgn(p.budget.delta) <= 0 || p.budget.delta >= 1) throw std::invalid_argument("delta must lie in (0,1)");
  for (const auto& g : p.gamma) require_modal_arity(g, p.arity);
  if (p.target) require_modal_arity(*p.target, p.arity);

  std::vector<Formula> events;
  std::vector<ModalFormula> deltas;
  for (const auto& g : p.gamma) collect(g, events, deltas);
  if (p.target) collect(*p.target, events, deltas);
  if (deltas.size() > 20) throw std::invalid_argument("too many Delta subformulas");

  const std::size_t k = events.size();
  const std::size_t M = p.budget.support.value_or(2 * k + 2);
  if (M == 0) throw std::invalid_argument("support budget must be positive");

  SatResult res;
  auto& diag = res.diagnostics;
  diag.events = k;
  diag.delta_subformulas = deltas.size();
  diag.support_size = M;

  // Case leaves per Delta pattern, filtered by abstract feasibility.
  CaseBuilder builder(events, deltas, p.budget.delta);
  const std::size_t patterns = std::size_t{1} << deltas.size();
  std::vector<std::vector<std::vector<Constraint>>> leaves(patterns);
  for (std::size_t pat = 0; pat < patterns; ++pat) {
    builder.set_pattern(pat);
    std::vector<std::vector<Case>> per;
    for (const auto& g : p.gamma) {
      auto cs = builder.expand(g);
      for (auto& c : cs) CaseBuilder::add(c.cons, c.value - Affine::constant(k, 1), lp::Sense::Ge);
      per.push_back(CaseBuilder::prune(std::move(cs)));
    }
    if (p.target) {
      auto cs = builder.expand(*p.target);
      for (auto& c : cs) CaseBuilder::add(c.cons, c.value - Affine::constant(k, 1 - p.budget.delta), lp::Sense::Le);
      per.push_back(CaseBuilder::prune(std::move(cs)));
    }
    for (auto& leaf : combine(per)) {
      ++diag.case_leaves;
      ++diag.lp_calls;
      if (abstract_feasible(leaf, k)) leaves[pat].push_back(std::move(leaf));
    }
  }

  std::vector<std::vector<Point>> supports{structured_support(p.arity)};
  Rng rng(p.budget.seed);
  std::size_t drawn = 0;
  while (drawn < p.budget.samples) {
    std::vector<Point> s;
    for (std::size_t j = 0; j < M && drawn < p.budget.samples; ++j, ++drawn) s.push_back(random_point(rng, p.arity));
    for (const auto& eps : enumerate_sigma(p.arity)) s.push_back(interior_point(eps));
    supports.push_back(std::move(s));
  }

  for (const auto& support : supports) {
    ++diag.supports_tried;
    std::vector<std::vector<Rational>> table(k, std::vector<Rational>(support.size()));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < support.size(); ++j) table[i][j] = evaluate(events[i], support[j]);

    for (std::size_t pat = 0; pat < patterns; ++pat) {
      ++diag.patterns_examined;
      for (const auto& leaf : leaves[pat]) {
        ++diag.lp_calls;
        auto w = weights_for(leaf, table);
        if (!w) continue;
        std::vector<Point> pts;
        std::vector<Rational> ws;
        for (std::size_t j = 0; j < support.size(); ++j) {
          if (sgn((*w)[j]) > 0) {
            pts.push_back(support[j]);
            ws.push_back((*w)[j]);
          }
        }
        auto witness = std::make_shared<const MixtureState>(std::move(pts), std::move(ws));
        std::vector<TraceLine> trace;
        bool ok = true;
        for (const auto& g : p.gamma) {
          Rational v = exact_value(eval_modal(*witness, g));
          ok = ok && v == 1;
          trace.push_back({"premise", print_formula(g), v});
        }
        if (p.target) {
          Rational v = exact_value(eval_modal(*witness, *p.target));
          ok = ok && v <= 1 - p.budget.delta;
          trace.push_back({"target", print_formula(*p.target), v});
        }
        if (!ok) continue;  // never expected; keep searching rather than report it
        res.sat = true;
        res.verified = true;
        res.witness = std::move(witness);
        res.trace = std::move(trace);
        return res;
      }
    }
  }
  return res;
}

EntailResult entails(const SatProblem& p) {
  if (!p.target) throw std::invalid_argument("entailment needs a target formula");
  EntailResult r;
  r.search = sat_search(p);
  r.holds_on_budget = !r.search.sat;
  return r;
}

}  // namespace prodstate
