#pragma once

// Truth functions of the standard product algebra [0,1]_Pi, evaluated
// directly on the AST.

#include <span>
#include <vector>

#include "prodstate/rational.hpp"
#include "prodstate/syntax.hpp"

namespace prodstate {

template <class T>
T product_impl(const T& a, const T& b) {
  if (a <= b) return T(1);
  return T(b / a);
}

// Evaluates f at point t (t.size() must cover every variable of f).
template <class T>
T evaluate(const Formula& f, std::span<const T> t) {
  switch (f.op()) {
    case Op::Bot: return T(0);
    case Op::Top: return T(1);
    case Op::Var: return t[f.var_index()];
    case Op::Conj: return T(evaluate(f.lhs(), t) * evaluate(f.rhs(), t));
    case Op::Impl: {
      T a = evaluate(f.lhs(), t);
      if (a == 0) return T(1);
      return product_impl(a, evaluate(f.rhs(), t));
    }
    case Op::Meet: {
      T a = evaluate(f.lhs(), t);
      if (a == 0) return a;
      T b = evaluate(f.rhs(), t);
      return b < a ? b : a;
    }
    case Op::Join: {
      T a = evaluate(f.lhs(), t);
      if (a == 1) return a;
      T b = evaluate(f.rhs(), t);
      return b < a ? a : b;
    }
  }
  return T(0);
}

template <class T>
T evaluate(const Formula& f, const std::vector<T>& t) {
  return evaluate<T>(f, std::span<const T>(t));
}

}  // namespace prodstate
