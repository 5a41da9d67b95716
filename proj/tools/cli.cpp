#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <optional>
#include <ostream>
#include <sstream>

#include "prodstate/cells.hpp"
#include "prodstate/fp1.hpp"
#include "prodstate/io.hpp"
#include "prodstate/modal.hpp"
#include "prodstate/pwl.hpp"
#include "prodstate/random.hpp"
#include "prodstate/semantics.hpp"
#include "prodstate/states.hpp"

namespace prodstate::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Output {
  json result;
  std::vector<std::string> diagnostics;
};

struct Flags {
  std::size_t arity = 0;
  std::string state, dist, problem, point;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::uint64_t horizon = 64;
  std::size_t formulas = 50;
  std::size_t depth = 6;
  bool modal = false;
  bool pretty = false;
  std::vector<std::string> texts;
};

std::size_t need_arity(const Flags& f) {
  if (f.arity == 0) throw UsageError("--arity is required and must be at least 1");
  return f.arity;
}

const std::string& need_text(const Flags& f, std::size_t count, const char* what) {
  if (f.texts.size() != count) throw UsageError(std::string("expected ") + what);
  return f.texts.front();
}

json read_file(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required");
  try {
    return read_json_file(path);
  } catch (const std::runtime_error& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

StatePtr load_state(const Flags& f) {
  std::optional<std::size_t> arity;
  if (f.arity > 0) arity = f.arity;
  return state_from_json(read_file(f.state, "--state"), arity);
}

Point parse_point(const std::string& text) {
  Point p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      p.push_back(parse_rational(item));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--point: ") + e.what());
    }
  }
  return p;
}

// ------------------------------------------------------------- commands

Output cmd_parse(const Flags& f) {
  const std::string& text = need_text(f, 1, "one formula");
  std::size_t n = need_arity(f);
  Output o;
  if (f.modal) {
    ModalFormula m = parse_modal(text, n);
    o.result = {{"formula", print_formula(m)}};
  } else {
    Formula p = parse_product(text, n);
    o.result = {{"formula", print_formula(p)}, {"size", p.size()}, {"depth", p.depth()}};
  }
  return o;
}

Output cmd_cells(const Flags& f) {
  std::size_t n = need_arity(f);
  if (f.texts.size() > 1) throw UsageError("expected at most one formula");
  Output o;
  o.result = json::array();
  if (f.texts.empty()) {
    for (const auto& eps : enumerate_sigma(n))
      o.result.push_back({{"eps", eps.to_string()}, {"atom", print_formula(atom_formula(eps))}});
    return o;
  }
  CellwiseFunc F = lower(parse_product(f.texts.front(), n), n);
  for (const auto& eps : enumerate_sigma(n)) {
    const CellFunc& c = F.at(eps);
    o.result.push_back({{"eps", eps.to_string()}, {"value", c.is_zero() ? std::string("ZERO") : c.term().to_string(eps)}});
  }
  return o;
}

Output cmd_eval(const Flags& f) {
  std::size_t n = need_arity(f);
  const std::string& text = need_text(f, 1, "one formula");
  if (f.point.empty()) throw UsageError("--point is required");
  Point t = parse_point(f.point);
  if (t.size() != n) throw UsageError("--point must have exactly arity coordinates");
  cell_of_point(t);  // range check
  Output o;
  o.result = format_rational(evaluate(parse_product(text, n), t));
  return o;
}

Output cmd_taut(const Flags& f) {
  std::size_t n = need_arity(f);
  Output o;
  o.result = is_tautology(parse_product(need_text(f, 1, "one formula"), n), n);
  return o;
}

Output cmd_equiv(const Flags& f) {
  std::size_t n = need_arity(f);
  if (f.texts.size() != 2) throw UsageError("expected two formulas");
  Output o;
  o.result = is_equivalent(parse_product(f.texts[0], n), parse_product(f.texts[1], n), n);
  return o;
}

void add_error_note(Output& o, const Value& v) {
  if (!is_exact(v)) o.diagnostics.push_back("std_error=" + format_value(Estimate{std_error(v), 0}));
}

Output cmd_state_eval(const Flags& f) {
  StatePtr s = load_state(f);
  const std::string& text = need_text(f, 1, "one formula");
  Value v = s->eval(parse_product(text, s->arity()));
  Output o;
  o.result = format_value(v);
  add_error_note(o, v);
  return o;
}

json report_json(const Report& r) {
  json v = json::array();
  for (const auto& x : r.violations) v.push_back({{"axiom", x.axiom}, {"detail", x.detail}});
  return {{"checks", r.checks}, {"violations", v}};
}

Output cmd_state_check(const Flags& f) {
  StatePtr s = load_state(f);
  Rng rng(f.seed.value_or(0));
  FormulaShape shape{s->arity(), f.depth, 0.25};
  auto suite = random_formulas(rng, shape, f.formulas);
  double tol = s->is_exact() ? 0.0 : f.tol.value_or(0.0);
  Report axioms = check_state_axioms(*s, suite, tol);
  Report prime = check_s4_prime(*s, suite, tol);
  Output o;
  o.result = {{"ok", axioms.ok() && prime.ok()}, {"axioms", report_json(axioms)}, {"s4_prime", report_json(prime)}};
  o.diagnostics.push_back("formulas=" + std::to_string(suite.size()));
  if (!s->is_exact()) o.diagnostics.push_back("approximate state: bands of tol + 3 standard errors");
  return o;
}

Output cmd_fp1_to_dist(const Flags& f) {
  StatePtr s = load_state(f);
  DistResult r = dist_from_state(*s, f.horizon);
  Output o;
  o.result = dist_to_json(r.dist);
  if (r.exact) {
    o.diagnostics.push_back("exact");
  } else {
    std::ostringstream ss;
    ss << "approximate: mass " << r.unresolved << " beyond horizon " << f.horizon << " unresolved";
    o.diagnostics.push_back(ss.str());
  }
  return o;
}

Output cmd_fp1_from_dist(const Flags& f) {
  SpectrumDist d = dist_from_json(read_file(f.dist, "--dist"));
  auto s = state_from_dist(d);  // validates
  std::vector<std::string> texts = f.texts;
  if (texts.empty()) texts = {"~x0", "~~x0", "x0", "x0^2", "x0^3"};
  json values = json::array();
  for (const auto& t : texts) {
    Formula phi = parse_product(t, 1);
    values.push_back({{"formula", print_formula(phi)}, {"canonical", canonicalize(phi).to_string()},
                      {"value", format_value(s->eval(phi))}});
  }
  Output o;
  o.result = {{"total_mass", format_rational(d.total_mass())}, {"condition_D", check_condition_D(d)}, {"values", values}};
  return o;
}

Output cmd_modal_eval(const Flags& f) {
  StatePtr s = load_state(f);
  Value v = eval_modal(*s, parse_modal(need_text(f, 1, "one modal formula"), s->arity()));
  Output o;
  o.result = format_value(v);
  add_error_note(o, v);
  return o;
}

Output cmd_modal_axioms(const Flags& f) {
  std::size_t n = f.arity;
  StatePtr s;
  if (!f.state.empty()) {
    s = load_state(f);
    if (n == 0) n = s->arity();
  }
  if (n == 0) throw UsageError("--arity or --state is required");
  if (f.texts.size() != 2) throw UsageError("expected two formulas phi and psi");
  auto inst = axiom_instances(parse_product(f.texts[0], n), parse_product(f.texts[1], n), n);
  json arr = json::array();
  for (const auto& i : inst) {
    json e = {{"name", i.name}, {"formula", print_formula(i.formula)}};
    if (s) e["value"] = format_value(eval_modal(*s, i.formula));
    arr.push_back(e);
  }
  Output o;
  o.result = {{"instances", arr}};
  if (s) {
    auto rep = check_soundness(*s, inst, f.tol.value_or(0.0));
    o.result["sound"] = rep.ok();
  }
  return o;
}

json trace_json(const std::vector<TraceLine>& trace) {
  json arr = json::array();
  for (const auto& t : trace) arr.push_back({{"role", t.role}, {"formula", t.formula}, {"value", format_rational(t.value)}});
  return arr;
}

json diag_json(const SatDiagnostics& d) {
  return {{"events", d.events},
          {"delta_subformulas", d.delta_subformulas},
          {"support_size", d.support_size},
          {"supports_tried", d.supports_tried},
          {"patterns_examined", d.patterns_examined},
          {"case_leaves", d.case_leaves},
          {"lp_calls", d.lp_calls}};
}

SatProblem load_problem(const Flags& f) {
  SatProblem p = problem_from_json(read_file(f.problem, "--problem"));
  if (f.seed) p.budget.seed = *f.seed;
  return p;
}

Output cmd_modal_sat(const Flags& f) {
  SatResult r = sat_search(load_problem(f));
  Output o;
  o.result = {{"status", r.sat ? "SAT" : "NO_WITNESS_FOUND"}, {"search", diag_json(r.diagnostics)}};
  if (r.sat) {
    o.result["witness"] = state_to_json(*r.witness);
    o.result["verified"] = r.verified;
    o.result["trace"] = trace_json(r.trace);
  } else {
    o.diagnostics.push_back("budget exhausted without a witness; this is not a proof of unsatisfiability");
  }
  return o;
}

Output cmd_modal_entails(const Flags& f) {
  SatProblem p = load_problem(f);
  if (!p.target) throw UsageError("--problem: entailment needs a \"target\"");
  EntailResult r = entails(p);
  Output o;
  o.result = {{"status", r.holds_on_budget ? "HOLDS_ON_BUDGET" : "COUNTERMODEL"}, {"search", diag_json(r.search.diagnostics)}};
  if (!r.holds_on_budget) {
    o.result["witness"] = state_to_json(*r.search.witness);
    o.result["verified"] = r.search.verified;
    o.result["trace"] = trace_json(r.search.trace);
  } else {
    o.diagnostics.push_back("no countermodel within the search budget");
  }
  return o;
}

void emit(std::ostream& out, bool ok, const json& result, const std::vector<std::string>& diags, bool pretty) {
  json doc = {{"ok", ok}, {"result", result}, {"diagnostics", diags}};
  out << (pretty ? doc.dump(2) : doc.dump()) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out) {
  Flags f;
  CLI::App app{"Probability over product logic: formulas, states, F_P(1) duality and FP(Pi, L_Delta)", "prodstate"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  using Handler = Output (*)(const Flags&);
  std::vector<std::pair<CLI::App*, Handler>> handlers;
  auto sub = [&](const char* name, const char* desc, Handler h) {
    CLI::App* c = app.add_subcommand(name, desc);
    c->add_flag("--json", f.pretty, "pretty-print the JSON output");
    handlers.emplace_back(c, h);
    return c;
  };
  auto arity = [&](CLI::App* c) { c->add_option("--arity", f.arity, "number of variables x0..x(N-1)"); };
  auto texts = [&](CLI::App* c, const char* what) { c->add_option("formulas", f.texts, what); };

  auto* c = sub("parse", "parse and print a formula", cmd_parse);
  arity(c);
  c->add_flag("--modal", f.modal, "parse a modal formula");
  texts(c, "formula text");

  c = sub("cells", "list the cells, or a formula's per-cell log-space term", cmd_cells);
  arity(c);
  texts(c, "optional formula");

  c = sub("eval", "evaluate a formula at a point", cmd_eval);
  arity(c);
  c->add_option("--point", f.point, "comma separated rationals, e.g. 1/2,1/4");
  texts(c, "formula");

  c = sub("taut", "decide whether a formula is a product tautology", cmd_taut);
  arity(c);
  texts(c, "formula");

  c = sub("equiv", "decide logical equivalence of two formulas", cmd_equiv);
  arity(c);
  texts(c, "two formulas");

  c = sub("state-eval", "evaluate a state on a formula", cmd_state_eval);
  c->add_option("--state", f.state, "state JSON file");
  arity(c);
  texts(c, "formula");

  c = sub("state-check", "check S1-S4 and S4' on a random formula suite", cmd_state_check);
  c->add_option("--state", f.state, "state JSON file");
  arity(c);
  c->add_option("--formulas", f.formulas, "suite size");
  c->add_option("--depth", f.depth, "maximum formula depth");
  c->add_option("--seed", f.seed, "suite seed");
  c->add_option("--tol", f.tol, "tolerance for sampling states");

  c = sub("fp1-to-dist", "spectrum distribution of a one-variable state", cmd_fp1_to_dist);
  c->add_option("--state", f.state, "state JSON file");
  c->add_option("--horizon", f.horizon, "chain length read off for non-closed-form states");

  c = sub("fp1-from-dist", "state of a spectrum distribution", cmd_fp1_from_dist);
  c->add_option("--dist", f.dist, "distribution JSON file");
  texts(c, "formulas to evaluate");

  c = sub("modal-eval", "evaluate a modal formula under a state", cmd_modal_eval);
  c->add_option("--state", f.state, "state JSON file");
  arity(c);
  texts(c, "modal formula");

  c = sub("modal-axioms", "instances of P1-P4 for phi and psi", cmd_modal_axioms);
  arity(c);
  c->add_option("--state", f.state, "check the instances under this state");
  c->add_option("--tol", f.tol, "tolerance for sampling states");
  texts(c, "phi and psi");

  c = sub("modal-sat", "search for a mixture satisfying the premises", cmd_modal_sat);
  c->add_option("--problem", f.problem, "problem JSON file");
  c->add_option("--seed", f.seed, "override the budget seed");

  c = sub("modal-entails", "search for a countermodel to an entailment", cmd_modal_entails);
  c->add_option("--problem", f.problem, "problem JSON file");
  c->add_option("--seed", f.seed, "override the budget seed");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::Success&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    emit(out, false, nullptr, {std::string("usage: ") + e.what()}, f.pretty);
    return 2;
  }

  Handler h = nullptr;
  for (auto& [cmd, handler] : handlers)
    if (cmd->parsed()) h = handler;

  try {
    Output o = h(f);
    emit(out, true, o.result, o.diagnostics, f.pretty);
    return 0;
  } catch (const UsageError& e) {
    emit(out, false, nullptr, {std::string("usage: ") + e.what()}, f.pretty);
    return 2;
  } catch (const ParseError& e) {
    emit(out, false, nullptr, {std::string("parse error ") + e.what()}, f.pretty);
    return 1;
  } catch (const std::exception& e) {
    emit(out, false, nullptr, {e.what()}, f.pretty);
    return 1;
  }
}

}  // namespace prodstate::cli
