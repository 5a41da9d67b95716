#include "prodstate/lp.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace prodstate::lp {

namespace {

class Tableau {
 public:
  // rows_ has `cols + 1` entries; the last is the right-hand side. The extra
  // row at index m holds reduced costs with -objective in the rhs slot.
  Tableau(std::size_t m, std::size_t cols) : m_(m), cols_(cols), t_(m + 1, std::vector<Rational>(cols + 1)), basis_(m) {}

  Rational& at(std::size_t i, std::size_t j) { return t_[i][j]; }
  Rational& rhs(std::size_t i) { return t_[i][cols_]; }
  std::size_t& basis(std::size_t i) { return basis_[i]; }
  std::size_t rows() const { return m_; }

  void pivot(std::size_t r, std::size_t c) {
    Rational inv = 1 / t_[r][c];
    auto& pr = t_[r];
    for (std::size_t j = 0; j <= cols_; ++j)
      if (sgn(pr[j]) != 0) pr[j] *= inv;
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j <= cols_; ++j)
      if (sgn(pr[j]) != 0) nz.push_back(j);
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      if (sgn(t_[i][c]) == 0) continue;
      Rational f = t_[i][c];
      for (std::size_t j : nz) t_[i][j] -= f * pr[j];
    }
    basis_[r] = c;
  }

  void set_cost(const std::vector<Rational>& cost) {
    auto& z = t_[m_];
    for (std::size_t j = 0; j <= cols_; ++j) z[j] = j < cost.size() ? cost[j] : Rational(0);
    for (std::size_t i = 0; i < m_; ++i) {
      const Rational& cb = z[basis_[i]];
      if (sgn(cb) == 0) continue;
      Rational f = cb;
      for (std::size_t j = 0; j <= cols_; ++j)
        if (sgn(t_[i][j]) != 0) z[j] -= f * t_[i][j];
    }
  }

  // Returns false when unbounded.
  bool optimize(const std::vector<bool>& allowed) {
    for (;;) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (allowed[j] && sgn(t_[m_][j]) < 0) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return true;
      std::size_t leave = m_;
      Rational best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (sgn(t_[i][enter]) <= 0) continue;
        Rational ratio = t_[i][cols_] / t_[i][enter];
        if (leave == m_ || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
  }

  Rational objective_value() { return -t_[m_][cols_]; }

  void drop_row(std::size_t r) {
    t_.erase(t_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --m_;
  }

 private:
  std::size_t m_;
  std::size_t cols_;
  std::vector<std::vector<Rational>> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

Solution solve(const Problem& problem) {
  const std::size_t n = problem.vars;
  const std::size_t m = problem.rows.size();

  // Columns: n structural, one slack per inequality row, one artificial per
  // row that has no natural basic column.
  std::vector<std::size_t> slack_of(m, SIZE_MAX);
  std::size_t cols = n;
  for (std::size_t i = 0; i < m; ++i)
    if (problem.rows[i].sense != Sense::Eq) slack_of[i] = cols++;

  std::vector<bool> flip(m, false);
  std::vector<std::size_t> art_of(m, SIZE_MAX);
  for (std::size_t i = 0; i < m; ++i) {
    const Row& row = problem.rows[i];
    if (row.coeffs.size() > n) throw std::invalid_argument("LP row wider than variable count");
    flip[i] = sgn(row.rhs) < 0;
    bool slack_basic = row.sense != Sense::Eq && ((row.sense == Sense::Le) != flip[i]);
    if (!slack_basic) art_of[i] = cols++;
  }
  const std::size_t first_art = n + static_cast<std::size_t>(std::count_if(
                                        slack_of.begin(), slack_of.end(), [](std::size_t s) { return s != SIZE_MAX; }));

  Tableau tab(m, cols);
  for (std::size_t i = 0; i < m; ++i) {
    const Row& row = problem.rows[i];
    Rational sign = flip[i] ? Rational(-1) : Rational(1);
    for (std::size_t j = 0; j < row.coeffs.size(); ++j)
      if (sgn(row.coeffs[j]) != 0) tab.at(i, j) = sign * row.coeffs[j];
    if (slack_of[i] != SIZE_MAX) tab.at(i, slack_of[i]) = sign * (row.sense == Sense::Le ? 1 : -1);
    tab.rhs(i) = sign * row.rhs;
    if (art_of[i] != SIZE_MAX) {
      tab.at(i, art_of[i]) = 1;
      tab.basis(i) = art_of[i];
    } else {
      tab.basis(i) = slack_of[i];
    }
  }

  Solution sol;
  std::vector<bool> allowed(cols, true);

  if (first_art < cols) {
    std::vector<Rational> phase1(cols);
    for (std::size_t j = first_art; j < cols; ++j) phase1[j] = 1;
    tab.set_cost(phase1);
    tab.optimize(allowed);
    if (sgn(tab.objective_value()) > 0) {
      sol.status = Status::Infeasible;
      return sol;
    }
    // Drive remaining artificials out of the basis.
    for (std::size_t i = 0; i < tab.rows();) {
      if (tab.basis(i) < first_art) {
        ++i;
        continue;
      }
      std::size_t col = first_art;
      for (std::size_t j = 0; j < first_art; ++j)
        if (sgn(tab.at(i, j)) != 0) {
          col = j;
          break;
        }
      if (col == first_art) {
        tab.drop_row(i);  // redundant equality
      } else {
        tab.pivot(i, col);
        ++i;
      }
    }
    for (std::size_t j = first_art; j < cols; ++j) allowed[j] = false;
  }

  std::vector<Rational> cost(cols);
  for (std::size_t j = 0; j < problem.objective.size() && j < n; ++j) cost[j] = problem.objective[j];
  tab.set_cost(cost);
  if (!tab.optimize(allowed)) {
    sol.status = Status::Unbounded;
    return sol;
  }

  sol.status = Status::Optimal;
  sol.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < tab.rows(); ++i)
    if (tab.basis(i) < n) sol.x[tab.basis(i)] = tab.rhs(i);
  sol.value = 0;
  for (std::size_t j = 0; j < problem.objective.size() && j < n; ++j) sol.value += problem.objective[j] * sol.x[j];
  return sol;
}

namespace {

void normalize(Inequality& row) {
  Integer g = abs(row.b);
  for (const auto& v : row.a) g = gcd(g, v);
  if (g > 1) {
    for (auto& v : row.a) v /= g;
    row.b /= g;
  }
}

}  // namespace

std::optional<bool> fm_feasible(std::vector<Inequality> rows, std::size_t dims, std::size_t row_cap) {
  for (std::size_t k = 0; k <= dims; ++k) {
    // Deduplicate by coefficient vector, keeping the tightest bound; detect
    // constant contradictions.
    std::map<std::vector<Integer>, Integer, bool (*)(const std::vector<Integer>&, const std::vector<Integer>&)> best(
        [](const std::vector<Integer>& x, const std::vector<Integer>& y) {
          return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(),
                                              [](const Integer& p, const Integer& q) { return cmp(p, q) < 0; });
        });
    for (auto& row : rows) {
      normalize(row);
      bool zero = std::all_of(row.a.begin(), row.a.end(), [](const Integer& v) { return sgn(v) == 0; });
      if (zero) {
        if (sgn(row.b) < 0) return false;
        continue;
      }
      auto [it, inserted] = best.emplace(row.a, row.b);
      if (!inserted && row.b < it->second) it->second = row.b;
    }
    if (k == dims) return true;

    std::vector<Inequality> pos, neg, next;
    for (auto& [a, b] : best) {
      int s = sgn(a[k]);
      Inequality row{a, b};
      if (s > 0) pos.push_back(std::move(row));
      else if (s < 0) neg.push_back(std::move(row));
      else next.push_back(std::move(row));
    }
    if (next.size() + pos.size() * neg.size() > row_cap) return std::nullopt;
    for (const auto& p : pos) {
      for (const auto& q : neg) {
        Integer fp = -q.a[k];  // > 0
        Integer fq = p.a[k];   // > 0
        Inequality r;
        r.a.resize(p.a.size());
        for (std::size_t j = 0; j < p.a.size(); ++j) r.a[j] = fp * p.a[j] + fq * q.a[j];
        r.b = fp * p.b + fq * q.b;
        next.push_back(std::move(r));
      }
    }
    rows = std::move(next);
  }
  return true;
}

bool simplex_feasible(const std::vector<Inequality>& rows, std::size_t dims) {
  Problem p;
  p.vars = 2 * dims;
  for (const auto& r : rows) {
    Row row;
    row.coeffs.assign(2 * dims, Rational(0));
    for (std::size_t j = 0; j < dims && j < r.a.size(); ++j) {
      row.coeffs[2 * j] = r.a[j];
      row.coeffs[2 * j + 1] = -r.a[j];
    }
    row.sense = Sense::Le;
    row.rhs = r.b;
    p.rows.push_back(std::move(row));
  }
  return solve(p).status != Status::Infeasible;
}

bool feasible(const std::vector<Inequality>& rows, std::size_t dims) {
  if (dims <= 4) {
    if (auto r = fm_feasible(rows, dims)) return *r;
  }
  return simplex_feasible(rows, dims);
}

}  // namespace prodstate::lp
