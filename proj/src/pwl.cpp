#include "prodstate/pwl.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "prodstate/lp.hpp"
#include "prodstate/semantics.hpp"

namespace prodstate {

// ---------------------------------------------------------------- LinForm

LinForm LinForm::unit(std::size_t dims, std::size_t i) {
  LinForm f(dims);
  f.coeffs_[i] = 1;
  return f;
}

bool LinForm::dominates(const LinForm& other) const {
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    if (coeffs_[i] > other.coeffs_[i]) return false;
  return true;
}

bool LinForm::nonnegative_on_cone() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Integer& v) { return sgn(v) <= 0; });
}

Integer LinForm::l1_norm() const {
  Integer s = 0;
  for (const auto& v : coeffs_) s += abs(v);
  return s;
}

Rational LinForm::monomial(std::span<const Rational> t) const {
  Rational r = 1;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (sgn(coeffs_[i]) == 0) continue;
    if (!coeffs_[i].fits_slong_p()) throw std::overflow_error("monomial exponent out of range");
    r *= rational_pow(t[i], coeffs_[i].get_si());
  }
  return r;
}

double LinForm::value(std::span<const double> u) const {
  double s = 0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) s += coeffs_[i].get_d() * u[i];
  return s;
}

LinForm operator+(const LinForm& a, const LinForm& b) {
  LinForm r(a.dims());
  for (std::size_t i = 0; i < a.dims(); ++i) r.coeffs_[i] = a.coeffs_[i] + b.coeffs_[i];
  return r;
}

LinForm operator-(const LinForm& a, const LinForm& b) {
  LinForm r(a.dims());
  for (std::size_t i = 0; i < a.dims(); ++i) r.coeffs_[i] = a.coeffs_[i] - b.coeffs_[i];
  return r;
}

LinForm operator-(const LinForm& a) {
  LinForm r(a.dims());
  for (std::size_t i = 0; i < a.dims(); ++i) r.coeffs_[i] = -a.coeffs_[i];
  return r;
}

bool operator<(const LinForm& a, const LinForm& b) {
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    int c = cmp(a.coeffs_[i], b.coeffs_[i]);
    if (c != 0) return c < 0;
  }
  return false;
}

// ---------------------------------------------------------------- pruning

namespace {

using Branch = MinMaxTerm::Branch;

constexpr std::size_t kMaxBranches = 200000;
constexpr std::size_t kLpPruneLimit = 48;

bool branch_less(const Branch& a, const Branch& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Feasibility of {u <= 0, L(u) <= -1 for L in forms}. By homogeneity this is
// equivalent to the existence of u <= 0 with every L(u) < 0.
bool strictly_negative_somewhere(std::size_t dims, const std::vector<LinForm>& forms) {
  std::vector<lp::Inequality> rows;
  rows.reserve(dims + forms.size());
  for (std::size_t i = 0; i < dims; ++i) {
    lp::Inequality r;
    r.a.assign(dims, Integer(0));
    r.a[i] = 1;
    r.b = 0;
    rows.push_back(std::move(r));
  }
  for (const auto& f : forms) rows.push_back({f.coeffs(), Integer(-1)});
  return lp::feasible(rows, dims);
}

void prune_forms(Branch& b) {
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  if (b.size() < 2) return;
  std::vector<bool> drop(b.size(), false);
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = 0; j < b.size() && !drop[i]; ++j) {
      if (i != j && !drop[j] && b[j].dominates(b[i])) drop[i] = true;
    }
  }
  Branch kept;
  kept.reserve(b.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    if (!drop[i]) kept.push_back(std::move(b[i]));
  b = std::move(kept);
}

// max(lo) <= max(hi) everywhere on the cone.
bool below_cheap(const Branch& lo, const Branch& hi) {
  return std::all_of(lo.begin(), lo.end(), [&](const LinForm& l) {
    return std::any_of(hi.begin(), hi.end(), [&](const LinForm& h) { return h.dominates(l); });
  });
}

bool below_exact(std::size_t dims, const Branch& lo, const Branch& hi) {
  for (const auto& l : lo) {
    if (std::any_of(hi.begin(), hi.end(), [&](const LinForm& h) { return h.dominates(l); })) continue;
    std::vector<LinForm> diffs;
    diffs.reserve(hi.size());
    for (const auto& h : hi) diffs.push_back(h - l);
    if (strictly_negative_somewhere(dims, diffs)) return false;
  }
  return true;
}

void prune_branches(std::size_t dims, std::vector<Branch>& branches) {
  for (auto& b : branches) prune_forms(b);
  std::sort(branches.begin(), branches.end(), branch_less);
  branches.erase(std::unique(branches.begin(), branches.end()), branches.end());
  if (branches.size() < 2) return;

  // A branch that lies above another one never attains the minimum.
  const bool exact = branches.size() <= kLpPruneLimit;
  std::vector<bool> drop(branches.size(), false);
  for (std::size_t i = 0; i < branches.size(); ++i) {
    for (std::size_t j = 0; j < branches.size() && !drop[i]; ++j) {
      if (i == j || drop[j]) continue;
      if (below_cheap(branches[j], branches[i])) drop[i] = true;
    }
  }
  if (exact) {
    for (std::size_t i = 0; i < branches.size(); ++i) {
      for (std::size_t j = 0; j < branches.size() && !drop[i]; ++j) {
        if (i == j || drop[j]) continue;
        if (below_exact(dims, branches[j], branches[i])) drop[i] = true;
      }
    }
  }
  std::vector<Branch> kept;
  kept.reserve(branches.size());
  for (std::size_t i = 0; i < branches.size(); ++i)
    if (!drop[i]) kept.push_back(std::move(branches[i]));
  branches = std::move(kept);
}

void check_size(std::size_t n) {
  if (n > kMaxBranches) throw TermTooLarge("min-max term exceeds " + std::to_string(kMaxBranches) + " branches");
}

}  // namespace

// ------------------------------------------------------------- MinMaxTerm

MinMaxTerm::MinMaxTerm(std::size_t dims, std::vector<Branch> branches) : dims_(dims), branches_(std::move(branches)) {
  if (branches_.empty()) throw std::invalid_argument("min-max term needs at least one branch");
  for (const auto& b : branches_) {
    if (b.empty()) throw std::invalid_argument("min-max term has an empty branch");
    for (const auto& f : b)
      if (f.dims() != dims_) throw std::invalid_argument("linear form dimension mismatch");
  }
  prune_branches(dims_, branches_);
}

MinMaxTerm MinMaxTerm::zero(std::size_t dims) { return MinMaxTerm(dims, {Branch{LinForm(dims)}}); }

MinMaxTerm MinMaxTerm::form(const LinForm& f) { return MinMaxTerm(f.dims(), {Branch{f}}); }

std::size_t MinMaxTerm::form_count() const {
  std::size_t n = 0;
  for (const auto& b : branches_) n += b.size();
  return n;
}

MinMaxTerm operator+(const MinMaxTerm& a, const MinMaxTerm& b) {
  check_size(a.branches_.size() * b.branches_.size());
  std::vector<Branch> out;
  out.reserve(a.branches_.size() * b.branches_.size());
  for (const auto& x : a.branches_) {
    for (const auto& y : b.branches_) {
      Branch s;
      s.reserve(x.size() * y.size());
      for (const auto& f : x)
        for (const auto& g : y) s.push_back(f + g);
      out.push_back(std::move(s));
    }
  }
  return MinMaxTerm(a.dims_, std::move(out));
}

MinMaxTerm operator-(const MinMaxTerm& a) {
  // -(min_i max_j F_ij) = max_i min_j (-F_ij), redistributed into min-max
  // form one outer branch at a time.
  std::vector<Branch> acc;
  bool first = true;
  for (const auto& branch : a.branches_) {
    std::vector<Branch> next;
    if (first) {
      for (const auto& f : branch) next.push_back(Branch{-f});
      first = false;
    } else {
      check_size(acc.size() * branch.size());
      next.reserve(acc.size() * branch.size());
      for (const auto& r : acc) {
        for (const auto& f : branch) {
          Branch b = r;
          b.push_back(-f);
          next.push_back(std::move(b));
        }
      }
    }
    prune_branches(a.dims_, next);
    acc = std::move(next);
  }
  return MinMaxTerm(a.dims_, std::move(acc));
}

MinMaxTerm min(const MinMaxTerm& a, const MinMaxTerm& b) {
  std::vector<Branch> out = a.branches_;
  out.insert(out.end(), b.branches_.begin(), b.branches_.end());
  return MinMaxTerm(a.dims_, std::move(out));
}

MinMaxTerm max(const MinMaxTerm& a, const MinMaxTerm& b) {
  check_size(a.branches_.size() * b.branches_.size());
  std::vector<Branch> out;
  out.reserve(a.branches_.size() * b.branches_.size());
  for (const auto& x : a.branches_) {
    for (const auto& y : b.branches_) {
      Branch s = x;
      s.insert(s.end(), y.begin(), y.end());
      out.push_back(std::move(s));
    }
  }
  return MinMaxTerm(a.dims_, std::move(out));
}

MinMaxTerm residuum(const MinMaxTerm& f, const MinMaxTerm& g) {
  return min(MinMaxTerm::zero(f.dims_), g + (-f));
}

Rational MinMaxTerm::exp_value(std::span<const Rational> t) const {
  std::optional<Rational> lo;
  for (const auto& b : branches_) {
    std::optional<Rational> hi;
    for (const auto& f : b) {
      Rational v = f.monomial(t);
      if (!hi || v > *hi) hi = std::move(v);
    }
    if (!lo || *hi < *lo) lo = std::move(hi);
  }
  return *lo;
}

double MinMaxTerm::value(std::span<const double> u) const {
  double lo = 0;
  bool first = true;
  for (const auto& b : branches_) {
    double hi = b.front().value(u);
    for (const auto& f : b) hi = std::max(hi, f.value(u));
    lo = first ? hi : std::min(lo, hi);
    first = false;
  }
  return lo;
}

bool MinMaxTerm::is_identically_zero() const {
  for (const auto& b : branches_) {
    if (std::any_of(b.begin(), b.end(), [](const LinForm& f) { return f.nonnegative_on_cone(); })) continue;
    if (strictly_negative_somewhere(dims_, b)) return false;
  }
  return true;
}

namespace {

std::string form_to_string(const LinForm& f, const CellIndex& cell) {
  std::vector<std::size_t> coord;
  for (std::size_t i = 0; i < cell.size(); ++i)
    if (cell.positive(i)) coord.push_back(i);
  std::string s;
  for (std::size_t k = 0; k < f.dims(); ++k) {
    const Integer& c = f.coeff(k);
    if (sgn(c) == 0) continue;
    Integer mag = abs(c);
    if (s.empty()) s += sgn(c) < 0 ? "-" : "";
    else s += sgn(c) < 0 ? " - " : " + ";
    if (mag != 1) s += mag.get_str() + "*";
    s += "u" + std::to_string(k < coord.size() ? coord[k] : k);
  }
  return s.empty() ? "0" : s;
}

}  // namespace

std::string MinMaxTerm::to_string(const CellIndex& cell) const {
  auto branch_str = [&](const Branch& b) {
    if (b.size() == 1) return form_to_string(b.front(), cell);
    std::string s = "max(";
    for (std::size_t i = 0; i < b.size(); ++i) s += (i ? ", " : "") + form_to_string(b[i], cell);
    return s + ")";
  };
  if (branches_.size() == 1) return branch_str(branches_.front());
  std::string s = "min(";
  for (std::size_t i = 0; i < branches_.size(); ++i) s += (i ? ", " : "") + branch_str(branches_[i]);
  return s + ")";
}

// ----------------------------------------------------------- CellwiseFunc

CellwiseFunc::CellwiseFunc(std::size_t arity, std::vector<CellFunc> cells) : arity_(arity), cells_(std::move(cells)) {
  if (cells_.size() != (std::size_t{1} << arity_)) throw std::invalid_argument("cellwise function must cover 2^n cells");
}

bool CellwiseFunc::is_zero_everywhere() const {
  return std::all_of(cells_.begin(), cells_.end(), [](const CellFunc& c) { return c.is_zero(); });
}

// ---------------------------------------------------------------- lowering

namespace {

class Memo {
 public:
  static Memo& instance() {
    static Memo memo;
    return memo;
  }

  std::shared_ptr<const CellwiseFunc> find(const Formula& f, std::size_t n) {
    std::lock_guard lock(mu_);
    auto& m = lowered_[n];
    auto it = m.find(f);
    return it == m.end() ? nullptr : it->second;
  }

  void store(const Formula& f, std::size_t n, std::shared_ptr<const CellwiseFunc> v) {
    std::lock_guard lock(mu_);
    auto& m = lowered_[n];
    if (m.size() > kCap) m.clear();
    m.emplace(f, std::move(v));
  }

  std::optional<bool> find_taut(const Formula& f, std::size_t n) {
    std::lock_guard lock(mu_);
    auto& m = taut_[n];
    auto it = m.find(f);
    if (it == m.end()) return std::nullopt;
    return it->second;
  }

  void store_taut(const Formula& f, std::size_t n, bool v) {
    std::lock_guard lock(mu_);
    auto& m = taut_[n];
    if (m.size() > kTautCap) m.clear();
    m.emplace(f, v);
  }

 private:
  static constexpr std::size_t kCap = 100000;
  static constexpr std::size_t kTautCap = 1000000;
  std::mutex mu_;
  std::map<std::size_t, std::unordered_map<Formula, std::shared_ptr<const CellwiseFunc>>> lowered_;
  std::map<std::size_t, std::unordered_map<Formula, bool>> taut_;
};

CellFunc lower_cell(const Formula& phi, const CellIndex& eps, const CellwiseFunc* l, const CellwiseFunc* r) {
  const std::size_t dims = eps.positive_count();
  switch (phi.op()) {
    case Op::Bot:
      return CellFunc::zero();
    case Op::Top:
      return CellFunc::pwl(MinMaxTerm::zero(dims));
    case Op::Var: {
      std::size_t i = phi.var_index();
      if (!eps.positive(i)) return CellFunc::zero();
      return CellFunc::pwl(MinMaxTerm::form(LinForm::unit(dims, eps.positive_rank(i))));
    }
    default:
      break;
  }
  const CellFunc& f = l->at(eps);
  const CellFunc& g = r->at(eps);
  switch (phi.op()) {
    case Op::Conj:
      if (f.is_zero() || g.is_zero()) return CellFunc::zero();
      return CellFunc::pwl(f.term() + g.term());
    case Op::Meet:
      if (f.is_zero() || g.is_zero()) return CellFunc::zero();
      return CellFunc::pwl(min(f.term(), g.term()));
    case Op::Join:
      if (f.is_zero()) return g;
      if (g.is_zero()) return f;
      return CellFunc::pwl(max(f.term(), g.term()));
    case Op::Impl:
      if (f.is_zero()) return CellFunc::pwl(MinMaxTerm::zero(dims));
      if (g.is_zero()) return CellFunc::zero();
      if (f.term() == g.term()) return CellFunc::pwl(MinMaxTerm::zero(dims));
      return CellFunc::pwl(residuum(f.term(), g.term()));
    default:
      return CellFunc::zero();
  }
}

void check_coefficient_bound(const Formula& phi, const CellFunc& c) {
  if (c.is_zero()) return;
  Integer bound(static_cast<unsigned long>(phi.var_leaves()));
  for (const auto& b : c.term().branches())
    for (const auto& f : b)
      if (f.l1_norm() > bound) throw std::logic_error("linear form coefficients exceed formula size");
}

std::shared_ptr<const CellwiseFunc> lower_shared(const Formula& phi, std::size_t n) {
  Memo& memo = Memo::instance();
  if (auto hit = memo.find(phi, n)) return hit;
  std::shared_ptr<const CellwiseFunc> l, r;
  if (phi.is_binary()) {
    l = lower_shared(phi.lhs(), n);
    r = lower_shared(phi.rhs(), n);
  }
  std::vector<CellFunc> cells;
  cells.reserve(std::size_t{1} << n);
  for (const auto& eps : enumerate_sigma(n)) {
    cells.push_back(lower_cell(phi, eps, l.get(), r.get()));
    check_coefficient_bound(phi, cells.back());
  }
  auto result = std::make_shared<const CellwiseFunc>(n, std::move(cells));
  memo.store(phi, n, result);
  return result;
}

// Cheap refutation: a point where phi < 1 settles non-tautology exactly.
bool refuted_by_sampling(const Formula& phi, std::size_t n) {
  static const Rational kValues[] = {Rational(1, 2), Rational(1, 3), Rational(3, 4), Rational(1, 5),
                                     Rational(2, 7), Rational(1), Rational(5, 6), Rational(1, 9)};
  constexpr std::size_t kCount = sizeof(kValues) / sizeof(kValues[0]);
  for (const auto& eps : enumerate_sigma(n)) {
    for (std::size_t k = 0; k < 4; ++k) {
      Point t(n);
      for (std::size_t i = 0; i < n; ++i) t[i] = eps.positive(i) ? kValues[(k + 3 * i) % kCount] : Rational(0);
      if (evaluate(phi, t) != 1) return true;
    }
  }
  return false;
}

}  // namespace

CellwiseFunc lower(const Formula& phi, std::size_t n) {
  require_arity(phi, n);
  return *lower_shared(phi, n);
}

Rational eval_cellwise(const CellwiseFunc& F, const Point& t) {
  if (t.size() != F.arity()) throw PointError("point dimension does not match arity");
  CellIndex eps = cell_of_point(t);
  const CellFunc& c = F.at(eps);
  if (c.is_zero()) return 0;
  std::vector<Rational> pos;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (eps.positive(i)) pos.push_back(t[i]);
  return c.term().exp_value(pos);
}

bool is_tautology(const Formula& phi, std::size_t n) {
  require_arity(phi, n);
  Memo& memo = Memo::instance();
  if (auto hit = memo.find_taut(phi, n)) return *hit;
  bool result;
  if (refuted_by_sampling(phi, n)) {
    result = false;
  } else {
    auto F = lower_shared(phi, n);
    result = true;
    for (std::size_t o = 0; o < F->cell_count() && result; ++o) {
      const CellFunc& c = F->at_ordinal(o);
      result = !c.is_zero() && c.term().is_identically_zero();
    }
  }
  memo.store_taut(phi, n, result);
  return result;
}

bool implies(const Formula& phi, const Formula& psi, std::size_t n) { return is_tautology(Formula::impl(phi, psi), n); }

bool is_equivalent(const Formula& phi, const Formula& psi, std::size_t n) {
  return implies(phi, psi, n) && implies(psi, phi, n);
}

bool is_boolean(const Formula& phi, std::size_t n) {
  return is_equivalent(Formula::neg(Formula::neg(phi)), phi, n);
}

bool is_zero_function(const Formula& phi, std::size_t n) {
  require_arity(phi, n);
  return lower_shared(phi, n)->is_zero_everywhere();
}

LinearCombination normalize_combination(const LinearCombination& c, const CellIndex& eps) {
  const std::size_t n = eps.size();
  const Formula atom = atom_formula(eps);
  std::vector<std::pair<Rational, Formula>> merged;
  std::vector<Formula> restricted;
  for (const auto& [coeff, f] : c.terms) {
    require_arity(f, n);
    if (lower_shared(f, n)->at(eps).is_zero()) continue;
    Formula fr = Formula::meet(f, atom);
    bool found = false;
    for (std::size_t k = 0; k < merged.size(); ++k) {
      if (is_equivalent(restricted[k], fr, n)) {
        merged[k].first += coeff;
        found = true;
        break;
      }
    }
    if (!found) {
      merged.emplace_back(coeff, f);
      restricted.push_back(fr);
    }
  }
  LinearCombination out;
  for (auto& [coeff, f] : merged)
    if (sgn(coeff) != 0) out.terms.emplace_back(std::move(coeff), std::move(f));
  return out;
}

}  // namespace prodstate
