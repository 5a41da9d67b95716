#include "prodstate/cells.hpp"

#include <algorithm>

namespace prodstate {

CellIndex::CellIndex(std::vector<std::uint8_t> digits) : digits_(std::move(digits)) {
  for (auto d : digits_)
    if (d != 1 && d != 2) throw std::invalid_argument("cell index digits must be 1 or 2");
}

CellIndex CellIndex::from_string(std::string_view s) {
  std::vector<std::uint8_t> d;
  d.reserve(s.size());
  for (char c : s) {
    if (c != '1' && c != '2') throw std::invalid_argument("cell index '" + std::string(s) + "' is not over {1,2}");
    d.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return CellIndex(std::move(d));
}

CellIndex CellIndex::from_ordinal(std::size_t n, std::size_t ordinal) {
  std::vector<std::uint8_t> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = ((ordinal >> (n - 1 - i)) & 1U) ? 2 : 1;
  return CellIndex(std::move(d));
}

std::size_t CellIndex::positive_count() const {
  return static_cast<std::size_t>(std::count(digits_.begin(), digits_.end(), std::uint8_t{2}));
}

std::size_t CellIndex::positive_rank(std::size_t i) const {
  return static_cast<std::size_t>(std::count(digits_.begin(), digits_.begin() + static_cast<std::ptrdiff_t>(i),
                                             std::uint8_t{2}));
}

std::size_t CellIndex::ordinal() const {
  std::size_t o = 0;
  for (auto d : digits_) o = (o << 1) | (d == 2 ? 1U : 0U);
  return o;
}

std::string CellIndex::to_string() const {
  std::string s;
  for (auto d : digits_) s += static_cast<char>('0' + d);
  return s;
}

std::vector<CellIndex> enumerate_sigma(std::size_t n) {
  if (n == 0) throw std::invalid_argument("arity must be at least 1");
  if (n > 20) throw std::invalid_argument("arity too large to enumerate cells");
  std::vector<CellIndex> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t o = 0; o < (std::size_t{1} << n); ++o) out.push_back(CellIndex::from_ordinal(n, o));
  return out;
}

Formula atom_formula(const CellIndex& eps) {
  if (eps.size() == 0) return Formula::top();
  auto literal = [&](std::size_t i) {
    Formula x = Formula::var(i);
    return eps.positive(i) ? Formula::neg(Formula::neg(x)) : Formula::neg(x);
  };
  Formula acc = literal(0);
  for (std::size_t i = 1; i < eps.size(); ++i) acc = Formula::meet(acc, literal(i));
  return acc;
}

Point interior_point(const CellIndex& eps) {
  Point p(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) p[i] = eps.positive(i) ? Rational(1, 2) : Rational(0);
  return p;
}

}  // namespace prodstate
