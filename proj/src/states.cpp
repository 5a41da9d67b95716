#include "prodstate/states.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "prodstate/random.hpp"
#include "prodstate/semantics.hpp"

namespace prodstate {

// ------------------------------------------------------------------ values

bool is_exact(const Value& v) { return std::holds_alternative<Rational>(v); }

double to_double(const Value& v) {
  if (const auto* q = std::get_if<Rational>(&v)) return q->get_d();
  return std::get<Estimate>(v).mean;
}

double std_error(const Value& v) {
  if (const auto* e = std::get_if<Estimate>(&v)) return e->std_error;
  return 0;
}

const Rational& exact_value(const Value& v) {
  if (const auto* q = std::get_if<Rational>(&v)) return *q;
  throw std::logic_error("value is a Monte-Carlo estimate, not exact");
}

std::string format_value(const Value& v) {
  if (const auto* q = std::get_if<Rational>(&v)) return format_rational(*q);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", std::get<Estimate>(v).mean);
  return buf;
}

// ---------------------------------------------------------- PointEvaluator

namespace {
constexpr std::size_t kPointCacheCap = 1000000;
}

PointEvaluator::PointEvaluator(std::vector<Point> points) : points_(std::move(points)) {}

std::vector<Rational> PointEvaluator::values(const Formula& f) const {
  std::lock_guard lock(mu_);
  if (cache_.size() > kPointCacheCap) cache_.clear();
  return values_locked(f);
}

const std::vector<Rational>& PointEvaluator::values_locked(const Formula& f) const {
  auto it = cache_.find(f);
  if (it != cache_.end()) return it->second;

  const std::size_t m = points_.size();
  std::vector<Rational> out(m);
  switch (f.op()) {
    case Op::Bot:
      break;
    case Op::Top:
      for (auto& v : out) v = 1;
      break;
    case Op::Var:
      for (std::size_t j = 0; j < m; ++j) out[j] = points_[j][f.var_index()];
      break;
    default: {
      // references into an unordered_map survive rehashing
      const auto& a = values_locked(f.lhs());
      const auto& b = values_locked(f.rhs());
      for (std::size_t j = 0; j < m; ++j) {
        switch (f.op()) {
          case Op::Conj: out[j] = a[j] * b[j]; break;
          case Op::Impl: out[j] = a[j] == 0 ? Rational(1) : product_impl(a[j], b[j]); break;
          case Op::Meet: out[j] = rational_min(a[j], b[j]); break;
          case Op::Join: out[j] = rational_max(a[j], b[j]); break;
          default: break;
        }
      }
    }
  }
  return cache_.emplace(f, std::move(out)).first->second;
}

namespace {

void check_point(const Point& p, std::size_t arity) {
  if (p.size() != arity) throw std::invalid_argument("support point has the wrong dimension");
  for (const auto& c : p)
    if (c < 0 || c > 1) throw std::invalid_argument("support point outside [0,1]^n");
}

}  // namespace

// ------------------------------------------------------------------ Dirac

DiracState::DiracState(Point point) : arity_(point.size()), eval_({std::move(point)}) {
  if (arity_ == 0) throw std::invalid_argument("state arity must be at least 1");
  check_point(eval_.points().front(), arity_);
}

Value DiracState::eval(const Formula& f) const {
  require_arity(f, arity_);
  return eval_.values(f).front();
}

std::optional<ChainLaw> DiracState::chain_law() const {
  if (arity_ != 1) return std::nullopt;
  ChainLaw law;
  const Rational& t = point()[0];
  if (t == 1)
    law.limit = 1;
  else if (t > 0)
    law.terms.emplace_back(Rational(1), t);
  return law;
}

// ---------------------------------------------------------------- Mixture

MixtureState::MixtureState(Unchecked, std::vector<Point> points, std::vector<Rational> weights)
    : arity_(points.empty() ? 0 : points.front().size()), weights_(std::move(weights)), eval_(std::move(points)) {
  if (eval_.points().empty()) throw std::invalid_argument("mixture needs at least one support point");
  if (eval_.points().size() != weights_.size()) throw std::invalid_argument("one weight per support point");
  if (arity_ == 0) throw std::invalid_argument("state arity must be at least 1");
  for (const auto& p : eval_.points()) check_point(p, arity_);
}

MixtureState::MixtureState(std::vector<Point> points, std::vector<Rational> weights)
    : MixtureState(Unchecked{}, std::move(points), std::move(weights)) {
  Rational total = 0;
  for (const auto& w : weights_) {
    if (w <= 0) throw std::invalid_argument("mixture weights must be positive");
    total += w;
  }
  if (total != 1) throw std::invalid_argument("mixture weights sum to " + format_rational(total) + ", not 1");
}

std::shared_ptr<MixtureState> MixtureState::unchecked(std::vector<Point> points, std::vector<Rational> weights) {
  return std::shared_ptr<MixtureState>(new MixtureState(Unchecked{}, std::move(points), std::move(weights)));
}

Value MixtureState::eval(const Formula& f) const {
  require_arity(f, arity_);
  auto vals = eval_.values(f);
  Rational s = 0;
  for (std::size_t j = 0; j < vals.size(); ++j) s += weights_[j] * vals[j];
  return s;
}

std::optional<ChainLaw> MixtureState::chain_law() const {
  if (arity_ != 1) return std::nullopt;
  ChainLaw law;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    const Rational& t = points()[j][0];
    if (t == 1)
      law.limit += weights_[j];
    else if (t > 0)
      law.terms.emplace_back(weights_[j], t);
  }
  return law;
}

// ---------------------------------------------------------------- Sampler

SamplerLaw SamplerLaw::product_beta(std::vector<std::pair<double, double>> params) {
  for (auto [a, b] : params)
    if (!(a > 0) || !(b > 0)) throw std::invalid_argument("beta parameters must be positive");
  SamplerLaw l;
  l.kind = Kind::ProductBeta;
  l.beta = std::move(params);
  return l;
}

SamplerLaw SamplerLaw::atom_mix(std::vector<Component> components) {
  if (components.empty()) throw std::invalid_argument("atom-mix needs at least one component");
  Rational total = 0;
  for (const auto& c : components) {
    if (c.weight <= 0) throw std::invalid_argument("atom-mix weights must be positive");
    if (static_cast<bool>(c.law) == c.atom.has_value())
      throw std::invalid_argument("atom-mix component must be either a law or a point");
    total += c.weight;
  }
  if (total != 1) throw std::invalid_argument("atom-mix weights must sum to 1");
  SamplerLaw l;
  l.kind = Kind::AtomMix;
  l.components = std::move(components);
  return l;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Continuous laws put no mass on 0, so a zero draw is a floating-point
// artefact and gets redrawn.
double positive_uniform(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x;
  do x = u(rng);
  while (x <= 0.0);
  return x;
}

double positive_beta(Rng& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  for (;;) {
    double x = ga(rng), y = gb(rng);
    if (x + y <= 0.0) continue;
    double v = x / (x + y);
    if (v > 0.0 && v <= 1.0) return v;
  }
}

void validate_law(const SamplerLaw& law, std::size_t arity) {
  switch (law.kind) {
    case SamplerLaw::Kind::Uniform:
      return;
    case SamplerLaw::Kind::ProductBeta:
      if (law.beta.size() != arity) throw std::invalid_argument("product-beta needs one (alpha, beta) per axis");
      return;
    case SamplerLaw::Kind::AtomMix:
      for (const auto& c : law.components) {
        if (c.law) validate_law(*c.law, arity);
        if (c.atom) check_point(*c.atom, arity);
      }
      return;
  }
}

void draw(const SamplerLaw& law, Rng& rng, std::vector<double>& x) {
  switch (law.kind) {
    case SamplerLaw::Kind::Uniform:
      for (auto& c : x) c = positive_uniform(rng);
      return;
    case SamplerLaw::Kind::ProductBeta:
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = positive_beta(rng, law.beta[i].first, law.beta[i].second);
      return;
    case SamplerLaw::Kind::AtomMix: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      double r = u(rng), acc = 0;
      const SamplerLaw::Component* pick = &law.components.back();
      for (const auto& c : law.components) {
        acc += c.weight.get_d();
        if (r < acc) {
          pick = &c;
          break;
        }
      }
      if (pick->law) {
        draw(*pick->law, rng, x);
      } else {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = (*pick->atom)[i].get_d();
      }
      return;
    }
  }
}

}  // namespace

SamplerState::SamplerState(std::size_t arity, SamplerLaw law, std::size_t n_samples, std::uint64_t seed)
    : arity_(arity), law_(std::move(law)), n_(n_samples), seed_(seed) {
  if (arity_ == 0) throw std::invalid_argument("state arity must be at least 1");
  if (n_ < 2) throw std::invalid_argument("sampler needs at least two samples");
  validate_law(law_, arity_);
}

Value SamplerState::eval(const Formula& f) const {
  require_arity(f, arity_);
  Rng rng(splitmix64(seed_ ^ splitmix64(f.hash())));
  std::vector<double> x(arity_);
  double mean = 0, m2 = 0;
  for (std::size_t k = 0; k < n_; ++k) {
    draw(law_, rng, x);
    double v = evaluate<double>(f, std::span<const double>(x));
    double d = v - mean;
    mean += d / static_cast<double>(k + 1);
    m2 += d * (v - mean);
  }
  double var = m2 / static_cast<double>(n_ - 1);
  return Estimate{mean, std::sqrt(var / static_cast<double>(n_))};
}

// --------------------------------------------------------------- Function

FunctionState::FunctionState(std::size_t arity, bool exact, Fn fn, std::string kind)
    : arity_(arity), exact_(exact), fn_(std::move(fn)), kind_(std::move(kind)) {}

Value FunctionState::eval(const Formula& f) const {
  require_arity(f, arity_);
  return fn_(f);
}

// ----------------------------------------------------------------- checks

bool Report::has(const std::string& axiom) const { return count(axiom) > 0; }

std::size_t Report::count(const std::string& axiom) const {
  std::size_t k = 0;
  for (const auto& v : violations)
    if (v.axiom == axiom) ++k;
  return k;
}

namespace {

// Signed sum of state values, exact when every summand is.
struct Qty {
  bool exact = true;
  Rational q;
  double mean = 0;
  double var = 0;

  Qty() = default;
  Qty(const Value& v) : exact(prodstate::is_exact(v)) {  // NOLINT
    if (exact) q = exact_value(v);
    mean = to_double(v);
    var = std_error(v) * std_error(v);
  }
  static Qty constant(const Rational& r) {
    Qty c;
    c.q = r;
    c.mean = r.get_d();
    return c;
  }

  Qty& operator+=(const Qty& o) {
    exact = exact && o.exact;
    q += o.q;
    mean += o.mean;
    var += o.var;
    return *this;
  }
  Qty& operator-=(const Qty& o) {
    exact = exact && o.exact;
    q -= o.q;
    mean -= o.mean;
    var += o.var;
    return *this;
  }
  friend Qty operator+(Qty a, const Qty& b) { return a += b; }
  friend Qty operator-(Qty a, const Qty& b) { return a -= b; }

  double band(double tol) const { return tol + 3.0 * std::sqrt(var); }
  bool is_zero(double tol) const { return exact ? sgn(q) == 0 : std::fabs(mean) <= band(tol); }
  bool nonpositive(double tol) const { return exact ? sgn(q) <= 0 : mean <= band(tol); }
  std::string str() const { return exact ? format_rational(q) : format_value(Estimate{mean, std::sqrt(var)}); }
};

std::string sv(const char* name, const Formula& f, const Value& v) {
  return std::string(name) + "(" + print_formula(f) + ")=" + format_value(v);
}

}  // namespace

Report check_state_axioms(const State& s, const std::vector<Formula>& formulas, double tol, unsigned axioms) {
  Report rep;
  const std::size_t n = s.arity();
  const std::size_t k = formulas.size();

  if (axioms & S1) {
    Value top = s.eval(Formula::top()), bot = s.eval(Formula::bot());
    rep.checks += 2;
    if (!(Qty(top) - Qty::constant(1)).is_zero(tol))
      rep.violations.push_back({"S1", "s(1)=" + format_value(top)});
    if (!Qty(bot).is_zero(tol)) rep.violations.push_back({"S1", "s(0)=" + format_value(bot)});
  }
  if (!(axioms & (S2 | S3 | S4))) return rep;

  std::vector<Value> v;
  v.reserve(k);
  for (const auto& f : formulas) v.push_back(s.eval(f));

  if (axioms & S2) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const Formula& f = formulas[i];
        const Formula& g = formulas[j];
        Value m = s.eval(Formula::meet(f, g)), J = s.eval(Formula::join(f, g));
        ++rep.checks;
        Qty d = Qty(m) + Qty(J) - Qty(v[i]) - Qty(v[j]);
        if (!d.is_zero(tol))
          rep.violations.push_back(
              {"S2", "s(f&g)+s(f|g)-s(f)-s(g)=" + d.str() + " for f=" + print_formula(f) + ", g=" + print_formula(g)});
      }
    }
  }

  if (axioms & S3) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        if (i == j) continue;
        ++rep.checks;
        Qty d = Qty(v[i]) - Qty(v[j]);
        if (d.nonpositive(tol)) continue;  // nothing to violate
        if (implies(formulas[i], formulas[j], n))
          rep.violations.push_back(
              {"S3", sv("s", formulas[i], v[i]) + " exceeds " + sv("s", formulas[j], v[j]) + " but f -> g is valid"});
      }
    }
  }

  if (axioms & S4) {
    for (std::size_t i = 0; i < k; ++i) {
      ++rep.checks;
      if (!Qty(v[i]).is_zero(tol)) continue;
      if (is_zero_function(formulas[i], n)) continue;
      Formula nn = Formula::neg(Formula::neg(formulas[i]));
      Value w = s.eval(nn);
      if (!Qty(w).is_zero(tol))
        rep.violations.push_back({"S4", sv("s", formulas[i], v[i]) + " but " + sv("s", nn, w)});
    }
  }
  return rep;
}

Report check_s4_prime(const State& s, const std::vector<Formula>& formulas, double tol) {
  Report rep;
  const std::size_t n = s.arity();
  const auto sigma = enumerate_sigma(n);
  std::vector<Formula> atoms;
  std::vector<Value> atom_vals;
  for (const auto& eps : sigma) {
    atoms.push_back(atom_formula(eps));
    atom_vals.push_back(s.eval(atoms.back()));
  }
  for (const auto& f : formulas) {
    CellwiseFunc F = lower(f, n);
    for (std::size_t e = 0; e < sigma.size(); ++e) {
      if (F.at(sigma[e]).is_zero()) continue;  // f & p_eps = 0
      ++rep.checks;
      Formula fe = Formula::meet(f, atoms[e]);
      Value v = s.eval(fe);
      if (!Qty(v).is_zero(tol)) continue;
      if (!Qty(atom_vals[e]).is_zero(tol))
        rep.violations.push_back(
            {"S4'", sv("s", fe, v) + " but s(p_" + sigma[e].to_string() + ")=" + format_value(atom_vals[e])});
    }
  }
  return rep;
}

Report derived_identities(const State& s, const Formula& f, const Formula& g, double tol) {
  Report rep;
  const std::size_t n = s.arity();
  const auto sigma = enumerate_sigma(n);

  // (i) the atoms carry a finitely additive probability
  std::vector<Formula> atoms;
  std::vector<Value> av;
  Qty total;
  for (const auto& eps : sigma) {
    atoms.push_back(atom_formula(eps));
    av.push_back(s.eval(atoms.back()));
    total += Qty(av.back());
  }
  ++rep.checks;
  if (!(total - Qty::constant(1)).is_zero(tol))
    rep.violations.push_back({"boolean-additivity", "atom masses sum to " + total.str()});
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    for (std::size_t b = a + 1; b < atoms.size(); ++b) {
      ++rep.checks;
      Qty d = Qty(s.eval(Formula::join(atoms[a], atoms[b]))) - Qty(av[a]) - Qty(av[b]);
      if (!d.is_zero(tol))
        rep.violations.push_back({"boolean-additivity", "s(p_" + sigma[a].to_string() + " | p_" + sigma[b].to_string() +
                                                            ") differs from the sum by " + d.str()});
    }
  }

  Value sf = s.eval(f), sg = s.eval(g);
  Formula meet = Formula::meet(f, g), join = Formula::join(f, g);

  // (ii) f & g = 0
  if (is_zero_function(meet, n)) {
    ++rep.checks;
    Qty d = Qty(s.eval(join)) - Qty(sf) - Qty(sg);
    if (!d.is_zero(tol))
      rep.violations.push_back({"disjoint-join", "s(f|g)-s(f)-s(g)=" + d.str() + " for f=" + print_formula(f) +
                                                     ", g=" + print_formula(g)});
  }
  // (iii) f | g = 1
  if (is_tautology(join, n)) {
    ++rep.checks;
    Qty d = Qty(s.eval(meet)) - Qty(sf) - Qty(sg) + Qty::constant(1);
    if (!d.is_zero(tol))
      rep.violations.push_back({"covering-meet", "s(f&g)-s(f)-s(g)+1=" + d.str() + " for f=" + print_formula(f) +
                                                     ", g=" + print_formula(g)});
  }
  // (iv)
  for (const Formula* h : {&f, &g}) {
    ++rep.checks;
    Formula nh = Formula::neg(*h);
    Qty d = Qty(s.eval(nh)) + Qty(s.eval(Formula::neg(nh))) - Qty::constant(1);
    if (!d.is_zero(tol))
      rep.violations.push_back({"negation-complement", "s(~f)+s(~~f)-1=" + d.str() + " for f=" + print_formula(*h)});
  }
  return rep;
}

Value tau_epsilon(const State& s, const CellIndex& eps, const LinearCombination& c) {
  if (eps.size() != s.arity()) throw ArityError("cell index length does not match state arity");
  LinearCombination norm = normalize_combination(c, eps);
  Formula atom = atom_formula(eps);
  Value den = s.eval(atom);

  if (s.is_exact()) {
    const Rational& d = exact_value(den);
    Rational sum = 0;
    if (d == 0) return sum;
    for (const auto& [lambda, f] : norm.terms) {
      Rational a = s.eval_exact(Formula::meet(f, atom));
      if (a > 0) sum += lambda * a / d;
    }
    return sum;
  }

  // delta method for a ratio of independent estimates
  double d = to_double(den), dv = std_error(den) * std_error(den);
  if (d <= 0) return Estimate{0, 0};
  double num = 0, num_var = 0;
  for (const auto& [lambda, f] : norm.terms) {
    Value a = s.eval(Formula::meet(f, atom));
    if (to_double(a) <= 0) continue;
    double l = lambda.get_d();
    num += l * to_double(a);
    num_var += l * l * std_error(a) * std_error(a);
  }
  double ratio = num / d;
  double var = num_var / (d * d) + ratio * ratio * dv / (d * d);
  return Estimate{ratio, std::sqrt(var)};
}

Value cell_decomposition_eval(const State& s, const Formula& f) {
  Qty total;
  for (const auto& eps : enumerate_sigma(s.arity())) total += Qty(s.eval(Formula::meet(f, atom_formula(eps))));
  if (total.exact) return total.q;
  return Estimate{total.mean, std::sqrt(total.var)};
}

}  // namespace prodstate
