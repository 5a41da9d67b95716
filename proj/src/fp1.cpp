#include "prodstate/fp1.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "prodstate/pwl.hpp"
#include "prodstate/semantics.hpp"

namespace prodstate {

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b) throw std::overflow_error("exponent overflow");
  return a + b;
}

Formula x0() { return Formula::var(0); }

Rational pow_u(const Rational& r, std::uint64_t n) {
  if (n > static_cast<std::uint64_t>(std::numeric_limits<long>::max())) throw std::overflow_error("exponent overflow");
  return rational_pow(r, static_cast<long>(n));
}

}  // namespace

// ------------------------------------------------------------------ canon

Formula Fp1Canon::to_formula() const {
  Formula x = x0();
  if (!pow) return at_zero ? Formula::neg(x) : Formula::bot();
  if (*pow == 0) return at_zero ? Formula::top() : Formula::neg(Formula::neg(x));
  Formula p = Formula::pow(x, *pow);
  return at_zero ? Formula::join(p, Formula::neg(x)) : p;
}

std::string Fp1Canon::to_string() const {
  if (!pow) return at_zero ? "~x0" : "0";
  if (*pow == 0) return at_zero ? "1" : "~~x0";
  std::string p = *pow == 1 ? "x0" : "x0^" + std::to_string(*pow);
  return at_zero ? p + " | ~x0" : p;
}

Rational Fp1Canon::value(const Rational& t) const {
  if (t == 0) return at_zero ? 1 : 0;
  if (!pow) return 0;
  return pow_u(t, *pow);
}

Fp1Canon canonicalize(const Formula& f) {
  require_arity(f, 1);
  Fp1Canon c;
  c.at_zero = evaluate(f, Point{Rational(0)}) == 1;
  CellwiseFunc F = lower(f, 1);
  const CellFunc& pos = F.at(CellIndex::from_string("2"));
  if (pos.is_zero()) return c;
  const auto& br = pos.term().branches();
  if (br.size() != 1 || br.front().size() != 1)
    throw std::logic_error("one-variable term did not reduce to a single monomial");
  const Integer& e = br.front().front().coeff(0);
  if (sgn(e) < 0 || !e.fits_ulong_p()) throw std::logic_error("unexpected exponent in one-variable term");
  c.pow = e.get_ui();
  return c;
}

Fp1Canon canon_conj(const Fp1Canon& a, const Fp1Canon& b) {
  Fp1Canon c{a.at_zero && b.at_zero, std::nullopt};
  if (a.pow && b.pow) c.pow = checked_add(*a.pow, *b.pow);
  return c;
}

Fp1Canon canon_impl(const Fp1Canon& a, const Fp1Canon& b) {
  Fp1Canon c{!a.at_zero || b.at_zero, std::nullopt};
  if (!a.pow)
    c.pow = 0;
  else if (b.pow)
    c.pow = *b.pow > *a.pow ? *b.pow - *a.pow : 0;
  return c;
}

Fp1Canon canon_meet(const Fp1Canon& a, const Fp1Canon& b) {
  Fp1Canon c{a.at_zero && b.at_zero, std::nullopt};
  if (a.pow && b.pow) c.pow = std::max(*a.pow, *b.pow);
  return c;
}

Fp1Canon canon_join(const Fp1Canon& a, const Fp1Canon& b) {
  Fp1Canon c{a.at_zero || b.at_zero, std::nullopt};
  if (!a.pow)
    c.pow = b.pow;
  else if (!b.pow)
    c.pow = a.pow;
  else
    c.pow = std::min(*a.pow, *b.pow);
  return c;
}

Fp1Canon canon_fold(const Formula& f) {
  require_arity(f, 1);
  switch (f.op()) {
    case Op::Bot: return Fp1Canon::zero_on_pos(false);
    case Op::Top: return Fp1Canon::power(true, 0);
    case Op::Var: return Fp1Canon::power(false, 1);
    case Op::Conj: return canon_conj(canon_fold(f.lhs()), canon_fold(f.rhs()));
    case Op::Impl: return canon_impl(canon_fold(f.lhs()), canon_fold(f.rhs()));
    case Op::Meet: return canon_meet(canon_fold(f.lhs()), canon_fold(f.rhs()));
    case Op::Join: return canon_join(canon_fold(f.lhs()), canon_fold(f.rhs()));
  }
  return {};
}

// ---------------------------------------------------------- SpectrumDist

Rational SpectrumDist::chain_mass(std::uint64_t n) const {
  if (n == 0) throw std::invalid_argument("chain positions start at 1");
  if (n <= prefix.size()) return prefix[n - 1];
  Rational m = 0;
  for (const auto& t : tails) m += t.c * pow_u(t.r, n);
  return m;
}

Rational SpectrumDist::chain_mass_from(std::uint64_t n) const {
  if (n == 0) throw std::invalid_argument("chain positions start at 1");
  Rational m = 0;
  for (std::uint64_t k = n; k <= prefix.size(); ++k) m += prefix[k - 1];
  std::uint64_t start = std::max<std::uint64_t>(n, prefix.size() + 1);
  for (const auto& t : tails) m += t.c * pow_u(t.r, start) / (1 - t.r);
  return m;
}

Rational SpectrumDist::total_mass() const { return neg + nn + chain_mass_from(1) + limit; }

SpectrumDist SpectrumDist::canonical() const {
  SpectrumDist d = *this;
  std::map<Rational, Rational> by_ratio;
  for (const auto& t : tails) by_ratio[t.r] += t.c;
  d.tails.clear();
  for (const auto& [r, c] : by_ratio)
    if (sgn(c) != 0) d.tails.push_back({c, r});
  while (!d.prefix.empty()) {
    std::uint64_t n = d.prefix.size();
    Rational tail = 0;
    for (const auto& t : d.tails) tail += t.c * pow_u(t.r, n);
    if (d.prefix.back() != tail) break;
    d.prefix.pop_back();
  }
  return d;
}

bool check_condition_D(const SpectrumDist& d) {
  // Walk down the chain from <~~x>: once a positive mass appears no zero may
  // follow. Beyond the prefix the tails decide.
  bool positive_seen = sgn(d.nn) > 0;
  for (const auto& m : d.prefix) {
    if (sgn(m) > 0)
      positive_seen = true;
    else if (positive_seen)
      return false;
  }
  bool tail_positive = false;
  for (const auto& t : d.tails)
    if (sgn(t.c) > 0) tail_positive = true;
  return tail_positive || !positive_seen;
}

void validate_dist(const SpectrumDist& d) {
  if (sgn(d.neg) < 0) throw DistError("mass at <~x> is negative");
  if (sgn(d.nn) < 0) throw DistError("mass at <~~x> is negative");
  if (sgn(d.limit) < 0) throw DistError("limit mass is negative");
  for (std::size_t i = 0; i < d.prefix.size(); ++i)
    if (sgn(d.prefix[i]) < 0) throw DistError("mass at <x^" + std::to_string(i + 1) + "> is negative");
  for (const auto& t : d.tails) {
    if (sgn(t.c) <= 0) throw DistError("tail coefficient must be positive");
    if (sgn(t.r) <= 0 || t.r >= 1) throw DistError("tail ratio must lie in (0,1)");
  }
  Rational total = d.total_mass();
  if (total != 1) throw DistError("total mass is " + format_rational(total) + ", not 1");
  if (!check_condition_D(d)) throw DistError("condition (D) fails: zero masses are not upward closed");
}

// ------------------------------------------------------------- duality

DistResult dist_from_state(const State& s, std::uint64_t horizon) {
  if (s.arity() != 1) throw ArityError("the spectrum is defined for one-variable states");
  const Formula x = x0();
  auto power = [&](std::uint64_t n) { return Formula::pow(x, n); };

  DistResult out;
  auto law = s.chain_law();
  if (law && s.is_exact()) {
    SpectrumDist& d = out.dist;
    d.neg = s.eval_exact(Formula::neg(x));
    d.nn = s.eval_exact(Formula::neg(Formula::neg(x))) - s.eval_exact(x);
    for (std::uint64_t n = 1; n < law->start; ++n) d.prefix.push_back(s.eval_exact(power(n)) - s.eval_exact(power(n + 1)));
    for (const auto& [a, r] : law->terms) d.tails.push_back({a * (1 - r), r});
    d.limit = law->limit;
    // the law must agree with the state where it claims to hold
    for (std::uint64_t n = law->start; n < law->start + 3; ++n) {
      Rational closed = law->limit;
      for (const auto& [a, r] : law->terms) closed += a * pow_u(r, n);
      if (closed != s.eval_exact(power(n))) throw std::logic_error("chain law disagrees with the state");
    }
    out.dist = d.canonical();
    out.exact = true;
    return out;
  }

  auto val = [&](const Formula& f) -> Rational {
    Value v = s.eval(f);
    if (auto* q = std::get_if<Rational>(&v)) return *q;
    return Rational(std::get<Estimate>(v).mean);
  };
  SpectrumDist& d = out.dist;
  d.neg = val(Formula::neg(x));
  Rational prev = val(x);
  d.nn = val(Formula::neg(Formula::neg(x))) - prev;
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    Rational next = val(power(n + 1));
    d.prefix.push_back(prev - next);
    prev = next;
  }
  out.unresolved = prev.get_d();
  out.exact = false;
  return out;
}

DistState::DistState(SpectrumDist d) : d_(std::move(d)) { validate_dist(d_); }

Rational DistState::eval_canon(const Fp1Canon& c) const {
  Rational v = c.at_zero ? d_.neg : Rational(0);
  if (!c.pow) return v;
  if (*c.pow == 0) return v + d_.nn + d_.chain_mass_from(1) + d_.limit;
  return v + d_.chain_mass_from(*c.pow) + d_.limit;
}

Value DistState::eval(const Formula& f) const {
  require_arity(f, 1);
  return eval_canon(canonicalize(f));
}

std::optional<ChainLaw> DistState::chain_law() const {
  ChainLaw law;
  law.start = d_.prefix.size() + 1;
  for (const auto& t : d_.tails) law.terms.emplace_back(t.c / (1 - t.r), t.r);
  law.limit = d_.limit;
  return law;
}

std::shared_ptr<const DistState> state_from_dist(const SpectrumDist& d) { return std::make_shared<const DistState>(d); }

}  // namespace prodstate
