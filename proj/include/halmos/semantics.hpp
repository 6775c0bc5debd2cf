#pragma once

#include <span>
#include <string>
#include <vector>

#include "halmos/errors.hpp"
#include "halmos/formula.hpp"
#include "halmos/pointset.hpp"
#include "halmos/term.hpp"

namespace halmos {

/// The solution set of the equation w = w2 over X.
inline PointSet equality_set(const Term& w, const Term& w2, const VariableSet& x,
                             const FiniteAlgebra& h) {
  PointSet r(x, &h);
  for (std::uint64_t i = 0; i < r.space_size(); ++i) {
    const Point p = decode(i, x, h);
    if (evaluate(w, p) == evaluate(w2, p)) r.set(i);
  }
  return r;
}

/// Do w and w2 agree somewhere?  The space is spanned by the variables the
/// two terms mention, in order of first occurrence (constant equations are
/// checked over the one-point space).
inline bool is_admissible(const Term& w, const Term& w2, const FiniteAlgebra& h) {
  std::vector<std::string> vars;
  collect_variables(w, vars);
  collect_variables(w2, vars);
  return !equality_set(w, w2, VariableSet(vars), h).none();
}

/// Inverse image of A under the affine map induced by s: the point v (over
/// s.codomain) belongs to the result precisely when the composite v o s
/// (over s.domain) belongs to A.
inline PointSet pullback(const Substitution& s, const PointSet& a) {
  if (!(a.variables() == s.domain)) {
    throw MismatchError("point set space disagrees with the substitution domain");
  }
  PointSet r(s.codomain, a.algebra());
  for (std::uint64_t i = 0; i < r.space_size(); ++i) {
    const Point v = decode(i, s.codomain, *a.algebra());
    if (a.contains(compose(v, s))) r.set(i);
  }
  return r;
}

namespace detail {

/// Drop the last coordinate of a space: keep the slice where it equals the
/// first element.  Only used on sets cylindrical in that coordinate.
inline PointSet drop_last_coordinate(const PointSet& a, const VariableSet& smaller) {
  PointSet r(smaller, a.algebra());
  for (std::uint64_t i = 0; i < r.space_size(); ++i) {
    if (a.test(i)) r.set(i);
  }
  return r;
}

inline PointSet val_rec(const Formula& u, const VariableSet& x, const FiniteAlgebra& h) {
  switch (u.kind()) {
    case FormulaKind::Equality:
      return equality_set(u.lhs(), u.rhs(), x, h);
    case FormulaKind::Not:
      return complement(val_rec(u.child(), x, h));
    case FormulaKind::And:
      return meet(val_rec(u.left(), x, h), val_rec(u.right(), x, h));
    case FormulaKind::Or:
      return join(val_rec(u.left(), x, h), val_rec(u.right(), x, h));
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      const std::string& v = u.variable();
      if (x.contains(v)) {
        PointSet body = val_rec(u.child(), x, h);
        return u.kind() == FormulaKind::Exists ? exists_q(body, v) : forall_q(body, v);
      }
      // quantifier over a variable outside the space: adjoin it as the last
      // coordinate, quantify there, project back down
      const VariableSet extended = x.extended(v);
      PointSet body = val_rec(u.child(), extended, h);
      PointSet quantified = u.kind() == FormulaKind::Exists ? exists_q(body, v) : forall_q(body, v);
      return drop_last_coordinate(quantified, x);
    }
  }
  throw Error("unreachable formula kind");
}

}  // namespace detail

/// The value of the formula: the set of points of Hom(W(X), H) satisfying
/// it.  Free variables must lie in X; bound variables may be anything and
/// cost one transient coordinate each while their quantifier is evaluated.
inline PointSet val(const Formula& u, const VariableSet& x, const FiniteAlgebra& h) {
  for (const auto& v : free_variables(u)) {
    if (!x.contains(v)) {
      throw MismatchError("free variable " + v + " outside the declared variable set");
    }
  }
  return detail::val_rec(u, x, h);
}

/// Does p satisfy u?  Membership of u in the logical kernel of p.
inline bool in_lker(const Formula& u, const Point& p) {
  return val(u, p.variables, *p.algebra).contains(p);
}

/// Is u satisfied by every point of the space over X?
inline bool in_theory(const Formula& u, const VariableSet& x, const FiniteAlgebra& h) {
  return val(u, x, h).all();
}

/// Same value set over every listed algebra, computed over the union of the
/// two formulas' free variables.
inline bool semantically_equal(const Formula& u, const Formula& v,
                               std::span<const FiniteAlgebra* const> algebras) {
  std::vector<std::string> names = free_variables(u);
  for (const auto& w : free_variables(v)) {
    bool present = false;
    for (const auto& n : names) present = present || n == w;
    if (!present) names.push_back(w);
  }
  const VariableSet x(names);
  for (const FiniteAlgebra* h : algebras) {
    if (!(val(u, x, *h) == val(v, x, *h))) return false;
  }
  return true;
}

}  // namespace halmos
