#pragma once

// The Boolean skeleton of the free product algebra on n generators: index
// strings eps in {1,2}^n, the atoms p_eps, the zero-pattern cells G_eps and
// their compact slices G_eps^q.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prodstate/rational.hpp"
#include "prodstate/syntax.hpp"

namespace prodstate {

using Point = std::vector<Rational>;
using RealPoint = std::vector<double>;

// A string over {1,2}. Position i is 2 when coordinate i is positive on the
// cell and 1 when it is zero.
class CellIndex {
 public:
  CellIndex() = default;
  explicit CellIndex(std::vector<std::uint8_t> digits);

  static CellIndex from_string(std::string_view s);
  // The ordinal-th index in lexicographic order over {1,2}^n.
  static CellIndex from_ordinal(std::size_t n, std::size_t ordinal);

  std::size_t size() const { return digits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return digits_[i]; }
  bool positive(std::size_t i) const { return digits_[i] == 2; }
  std::size_t positive_count() const;
  // Position of coordinate i among the positive coordinates; i must be positive.
  std::size_t positive_rank(std::size_t i) const;
  std::size_t ordinal() const;

  std::string to_string() const;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;

 private:
  std::vector<std::uint8_t> digits_;
};

class PointError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// All 2^n indices in lexicographic order.
std::vector<CellIndex> enumerate_sigma(std::size_t n);

// p_eps: meet over i of ~x_i (eps_i = 1) or ~~x_i (eps_i = 2).
Formula atom_formula(const CellIndex& eps);

template <class T>
CellIndex cell_of_point(std::span<const T> t) {
  std::vector<std::uint8_t> d(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < 0 || t[i] > 1) throw PointError("coordinate " + std::to_string(i) + " outside [0,1]");
    d[i] = t[i] == 0 ? 1 : 2;
  }
  return CellIndex(std::move(d));
}

inline CellIndex cell_of_point(const Point& t) { return cell_of_point<Rational>(std::span<const Rational>(t)); }
inline CellIndex cell_of_point(const RealPoint& t) { return cell_of_point<double>(std::span<const double>(t)); }

// 0 on zero coordinates, 1/2 on positive ones.
Point interior_point(const CellIndex& eps);

template <class T>
bool in_slice(std::span<const T> t, const CellIndex& eps, const T& q) {
  if (t.size() != eps.size()) return false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (eps.positive(i)) {
      if (t[i] < q || t[i] > 1) return false;
    } else if (t[i] != 0) {
      return false;
    }
  }
  return true;
}

inline bool in_slice(const Point& t, const CellIndex& eps, const Rational& q) {
  if (q <= 0 || q > 1) throw std::invalid_argument("slice parameter must lie in (0,1]");
  return in_slice<Rational>(std::span<const Rational>(t), eps, q);
}

}  // namespace prodstate
