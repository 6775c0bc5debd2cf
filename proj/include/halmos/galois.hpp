#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "halmos/algebra.hpp"
#include "halmos/errors.hpp"
#include "halmos/formula.hpp"
#include "halmos/pointset.hpp"
#include "halmos/pool.hpp"
#include "halmos/semantics.hpp"
#include "halmos/term.hpp"

namespace halmos {

/// A system of equations between terms over a common variable set.
struct EquationSet {
  std::vector<std::pair<Term, Term>> pairs;

  std::size_t size() const { return pairs.size(); }
};

/// Points satisfying every equation of T.  The empty system cuts nothing
/// out, so its solution set is the whole space.
inline PointSet ag_solutions(const EquationSet& t, const VariableSet& x, const FiniteAlgebra& h) {
  PointSet r = PointSet::full(x, &h);
  for (const auto& [w, w2] : t.pairs) r = meet(r, equality_set(w, w2, x, h));
  return r;
}

/// Points satisfying every formula of the pool.
inline PointSet lg_solutions(const FormulaPool& pool, const VariableSet& x,
                             const FiniteAlgebra& h) {
  PointSet r = PointSet::full(x, &h);
  for (const Formula& u : pool.formulas) r = meet(r, val(u, x, h));
  return r;
}

/// Is u satisfied by every point of A?  Membership of u in the upper set of
/// A under the logical correspondence.
inline bool lg_up_contains(const PointSet& a, const Formula& u) {
  return a.is_subset_of(val(u, a.variables(), *a.algebra()));
}

/// The logical closure: saturate A under the automorphism action on points.
/// Definable sets are unions of orbits, and every orbit union is definable
/// over a finite algebra, so this is exactly the double-turn closure.
inline PointSet lg_closure(const PointSet& a) {
  const auto auts = automorphisms(*a.algebra());
  PointSet r = a;
  for (std::uint64_t index : a.members()) {
    const Point p = decode(index, a.variables(), *a.algebra());
    for (const ElementMap& sigma : auts) {
      std::vector<int> values = p.values;
      for (int& v : values) v = sigma(v);
      r.set(encode(Point(a.variables(), a.algebra(), std::move(values))));
    }
  }
  return r;
}

/// A set is definable exactly when it is closed.
inline bool is_definable(const PointSet& a) { return lg_closure(a) == a; }

struct ClosureResult {
  PointSet set;
  bool exact = true;
};

struct AgOptions {
  std::size_t max_elements = 4096;  // cap on the generated product subalgebra
  bool approximate_fallback = false;
  int fallback_term_depth = 3;
};

/// Equational closure via bounded term enumeration: two terms are linked
/// when they agree on all of A; a point survives when it satisfies every
/// linked pair.  Terms are deduplicated by value table over the space, so
/// only distinct term functions are kept per depth layer.  Exact only when
/// the depth bound already exhausts the distinct term functions.
inline PointSet ag_closure_by_terms(const PointSet& a, int max_term_depth = 3) {
  const VariableSet& x = a.variables();
  const FiniteAlgebra& h = *a.algebra();
  if (a.none()) return a;

  const std::uint64_t m = a.space_size();
  // value tables of terms, layered by depth, deduplicated
  std::vector<std::vector<int>> tables;
  std::vector<int> depth_of;
  std::map<std::vector<int>, int> seen;
  auto push = [&](std::vector<int> table, int d) {
    if (seen.contains(table)) return;
    seen[table] = static_cast<int>(tables.size());
    tables.push_back(std::move(table));
    depth_of.push_back(d);
  };

  for (int k = 0; k < x.size(); ++k) {
    std::vector<int> table(static_cast<std::size_t>(m));
    for (std::uint64_t i = 0; i < m; ++i) {
      table[static_cast<std::size_t>(i)] = decode(i, x, h).values[static_cast<std::size_t>(k)];
    }
    push(std::move(table), 0);
  }
  for (std::size_t op = 0; op < h.signature().size(); ++op) {
    if (h.signature().operation(static_cast<int>(op)).arity == 0) {
      push(std::vector<int>(static_cast<std::size_t>(m), h.table(static_cast<int>(op))[0]), 0);
    }
  }

  for (int d = 1; d <= max_term_depth; ++d) {
    const std::size_t limit = tables.size();
    if (limit == 0) break;
    for (std::size_t op = 0; op < h.signature().size(); ++op) {
      const int arity = h.signature().operation(static_cast<int>(op)).arity;
      if (arity == 0) continue;
      std::vector<std::size_t> pick(static_cast<std::size_t>(arity), 0);
      std::vector<int> args(static_cast<std::size_t>(arity));
      while (true) {
        bool fresh = false;
        for (std::size_t i = 0; i < pick.size(); ++i) fresh = fresh || depth_of[pick[i]] == d - 1;
        if (fresh) {
          std::vector<int> table(static_cast<std::size_t>(m));
          for (std::uint64_t i = 0; i < m; ++i) {
            for (int j = 0; j < arity; ++j) {
              args[static_cast<std::size_t>(j)] = tables[pick[static_cast<std::size_t>(j)]][static_cast<std::size_t>(i)];
            }
            table[static_cast<std::size_t>(i)] = h.apply(static_cast<int>(op), args);
          }
          push(std::move(table), d);
        }
        int pos = arity - 1;
        while (pos >= 0 && ++pick[static_cast<std::size_t>(pos)] == limit) {
          pick[static_cast<std::size_t>(pos)] = 0;
          --pos;
        }
        if (pos < 0) break;
      }
    }
  }

  // group by restriction to A; inside a group every pair must keep agreeing
  const std::vector<std::uint64_t> support = a.members();
  std::map<std::vector<int>, std::vector<int>> groups;
  for (std::size_t t = 0; t < tables.size(); ++t) {
    std::vector<int> key;
    key.reserve(support.size());
    for (std::uint64_t i : support) key.push_back(tables[t][static_cast<std::size_t>(i)]);
    groups[key].push_back(static_cast<int>(t));
  }

  PointSet r = PointSet::full(x, &h);
  for (const auto& [key, group] : groups) {
    const std::vector<int>& reference = tables[static_cast<std::size_t>(group.front())];
    for (std::size_t g = 1; g < group.size(); ++g) {
      const std::vector<int>& other = tables[static_cast<std::size_t>(group[g])];
      for (std::uint64_t i = 0; i < m; ++i) {
        if (other[static_cast<std::size_t>(i)] != reference[static_cast<std::size_t>(i)]) {
          r.set(i, false);
        }
      }
    }
  }
  return r;
}

/// The algebraic double-turn closure of A, by the product factorization: a
/// point belongs to the closure exactly when sending each joint generator
/// g_k = (p(x_k))_{p in A} to its value extends to a homomorphism from the
/// subalgebra the generators span inside H^A back to H.  The subalgebra is
/// built lazily (tuples under componentwise operations), so H^A is never
/// materialized.  On an empty A the closure is empty by convention.
inline ClosureResult ag_closure(const PointSet& a, AgOptions opt = {}) {
  const VariableSet& x = a.variables();
  const FiniteAlgebra& h = *a.algebra();
  if (a.none()) return {a, true};

  const std::vector<std::uint64_t> support = a.members();
  const std::size_t m = support.size();

  std::map<std::vector<int>, int> index_of;
  std::vector<std::vector<int>> elements;
  bool over_budget = false;
  auto add_tuple = [&](const std::vector<int>& tuple) -> int {
    auto it = index_of.find(tuple);
    if (it != index_of.end()) return it->second;
    if (elements.size() >= opt.max_elements) {
      over_budget = true;
      return -1;
    }
    const int id = static_cast<int>(elements.size());
    index_of.emplace(tuple, id);
    elements.push_back(tuple);
    return id;
  };

  // joint generators: one per variable, plus the constants
  std::vector<int> generator_ids(static_cast<std::size_t>(x.size()));
  std::vector<Point> points;
  points.reserve(m);
  for (std::uint64_t i : support) points.push_back(decode(i, x, h));
  for (int k = 0; k < x.size() && !over_budget; ++k) {
    std::vector<int> tuple(m);
    for (std::size_t j = 0; j < m; ++j) tuple[j] = points[j].values[static_cast<std::size_t>(k)];
    generator_ids[static_cast<std::size_t>(k)] = add_tuple(tuple);
  }
  std::vector<std::pair<int, int>> constant_ids;  // (op, element id)
  for (std::size_t op = 0; op < h.signature().size() && !over_budget; ++op) {
    if (h.signature().operation(static_cast<int>(op)).arity == 0) {
      const int c = h.table(static_cast<int>(op))[0];
      constant_ids.emplace_back(static_cast<int>(op), add_tuple(std::vector<int>(m, c)));
    }
  }

  // worklist closure under componentwise operations
  std::vector<int> args;
  std::vector<int> tuple(m);
  for (std::size_t next = 0; next < elements.size() && !over_budget; ++next) {
    for (std::size_t op = 0; op < h.signature().size() && !over_budget; ++op) {
      const int arity = h.signature().operation(static_cast<int>(op)).arity;
      if (arity == 0) continue;
      // every argument tuple drawing at least once from `next`
      std::vector<std::size_t> pick(static_cast<std::size_t>(arity), 0);
      while (!over_budget) {
        bool uses_next = false;
        for (std::size_t i = 0; i < pick.size(); ++i) uses_next = uses_next || pick[i] == next;
        if (uses_next && *std::max_element(pick.begin(), pick.end()) <= next) {
          args.assign(static_cast<std::size_t>(arity), 0);
          for (std::size_t j = 0; j < m; ++j) {
            for (int i = 0; i < arity; ++i) {
              args[static_cast<std::size_t>(i)] = elements[pick[static_cast<std::size_t>(i)]][j];
            }
            tuple[j] = h.apply(static_cast<int>(op), args);
          }
          add_tuple(tuple);
        }
        int pos = arity - 1;
        while (pos >= 0 && ++pick[static_cast<std::size_t>(pos)] == next + 1) {
          pick[static_cast<std::size_t>(pos)] = 0;
          --pos;
        }
        if (pos < 0) break;
      }
    }
  }

  if (over_budget) {
    if (opt.approximate_fallback) {
      return {ag_closure_by_terms(a, opt.fallback_term_depth), false};
    }
    throw ResourceError("product subalgebra for the closure exceeds " +
                        std::to_string(opt.max_elements) + " elements");
  }

  // record one application list covering every op over the closure, used to
  // force and verify candidate images in one replay
  struct Production {
    int op;
    std::vector<int> args;
    int result;
  };
  std::vector<Production> productions;
  for (std::size_t op = 0; op < h.signature().size(); ++op) {
    const int arity = h.signature().operation(static_cast<int>(op)).arity;
    if (arity == 0) continue;
    std::vector<std::size_t> pick(static_cast<std::size_t>(arity), 0);
    while (true) {
      args.assign(static_cast<std::size_t>(arity), 0);
      for (std::size_t j = 0; j < m; ++j) {
        for (int i = 0; i < arity; ++i) {
          args[static_cast<std::size_t>(i)] = elements[pick[static_cast<std::size_t>(i)]][j];
        }
        tuple[j] = h.apply(static_cast<int>(op), args);
      }
      std::vector<int> arg_ids(pick.begin(), pick.end());
      productions.push_back(Production{static_cast<int>(op), std::move(arg_ids),
                                       index_of.at(tuple)});
      int pos = arity - 1;
      while (pos >= 0 && ++pick[static_cast<std::size_t>(pos)] == elements.size()) {
        pick[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
  }

  PointSet closure(x, &h);
  std::vector<int> image(elements.size());
  std::vector<bool> assigned(elements.size());
  std::vector<int> op_args;
  for (std::uint64_t candidate = 0; candidate < a.space_size(); ++candidate) {
    const Point v = decode(candidate, x, h);
    std::fill(assigned.begin(), assigned.end(), false);
    bool ok = true;
    auto pin = [&](int id, int value) {
      if (assigned[static_cast<std::size_t>(id)]) {
        if (image[static_cast<std::size_t>(id)] != value) ok = false;
        return;
      }
      assigned[static_cast<std::size_t>(id)] = true;
      image[static_cast<std::size_t>(id)] = value;
    };
    for (int k = 0; k < x.size() && ok; ++k) {
      pin(generator_ids[static_cast<std::size_t>(k)], v.values[static_cast<std::size_t>(k)]);
    }
    for (const auto& [op, id] : constant_ids) {
      if (!ok) break;
      pin(id, h.table(op)[0]);
    }
    // forced images propagate in production order until fixpoint; the same
    // sweep doubles as the homomorphism check once everything is assigned
    bool changed = true;
    while (ok && changed) {
      changed = false;
      for (const Production& pr : productions) {
        bool ready = true;
        for (int arg : pr.args) ready = ready && assigned[static_cast<std::size_t>(arg)];
        if (!ready) continue;
        op_args.clear();
        for (int arg : pr.args) op_args.push_back(image[static_cast<std::size_t>(arg)]);
        const int value = h.apply(pr.op, op_args);
        if (!assigned[static_cast<std::size_t>(pr.result)]) {
          pin(pr.result, value);
          changed = true;
        } else if (image[static_cast<std::size_t>(pr.result)] != value) {
          ok = false;
          break;
        }
      }
    }
    if (ok) closure.set(candidate);
  }
  return {closure, true};
}

/// The model-theoretic double-turn closure coincides with the logical one.
inline PointSet mt_closure(const PointSet& a) { return lg_closure(a); }

/// Does composing with s carry every point of A into B?  s sends the
/// variables of B's space to terms over A's space.
inline bool is_category_morphism(const Substitution& s, const PointSet& a, const PointSet& b) {
  if (!(b.variables() == s.domain)) {
    throw MismatchError("target space disagrees with the substitution domain");
  }
  if (!(a.variables() == s.codomain)) {
    throw MismatchError("source space disagrees with the substitution codomain");
  }
  return a.is_subset_of(pullback(s, b));
}

/// Greedy finite subsystem with the same solution set: keep a formula only
/// when it strictly shrinks the running intersection.  At most n^|X|
/// formulas survive, since each keeps cutting a finite set down.
inline FormulaPool noetherian_witness(const FormulaPool& pool, const VariableSet& x,
                                      const FiniteAlgebra& h) {
  FormulaPool witness;
  PointSet running = PointSet::full(x, &h);
  for (const Formula& u : pool.formulas) {
    PointSet cut = meet(running, val(u, x, h));
    if (!(cut == running)) {
      witness.formulas.push_back(u);
      running = cut;
    }
  }
  witness.parameters = "witness of " + std::to_string(pool.size()) + " formulas";
  return witness;
}

}  // namespace halmos
