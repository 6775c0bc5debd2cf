#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "halmos/halmos.hpp"

namespace halmos::fixtures {

inline FiniteAlgebra make_z2() {
  Signature sig({{"add", 2}, {"neg", 1}, {"e", 0}});
  return FiniteAlgebra("Z2", sig, {"0", "1"}, {{0, 1, 1, 0}, {0, 1}, {0}});
}

inline FiniteAlgebra make_z3() {
  Signature sig({{"add", 2}, {"neg", 1}, {"e", 0}});
  return FiniteAlgebra("Z3", sig, {"0", "1", "2"},
                       {{0, 1, 2, 1, 2, 0, 2, 0, 1}, {0, 2, 1}, {0}});
}

inline FiniteAlgebra make_l2() {
  Signature sig({{"meet", 2}, {"0", 0}, {"1", 0}});
  return FiniteAlgebra("L2", sig, {"0", "1"}, {{0, 0, 0, 1}, {0}, {1}});
}

inline FiniteAlgebra make_z2sq() { return direct_power(make_z2(), 2); }

/// The image of h under a carrier permutation: element i of the new algebra
/// is element perm[i] of the old one, with fresh labels.
inline FiniteAlgebra permute_algebra(const FiniteAlgebra& h, const std::vector<int>& perm,
                                     std::vector<std::string> labels, const std::string& name) {
  const int n = h.size();
  std::vector<int> inverse(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) inverse[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
  std::vector<std::vector<int>> tables;
  for (std::size_t op = 0; op < h.signature().size(); ++op) {
    const int arity = h.signature().operation(static_cast<int>(op)).arity;
    std::vector<int> table;
    std::vector<int> args(static_cast<std::size_t>(arity), 0);
    while (true) {
      std::vector<int> old_args;
      for (int a : args) old_args.push_back(perm[static_cast<std::size_t>(a)]);
      table.push_back(inverse[static_cast<std::size_t>(h.apply(static_cast<int>(op), old_args))]);
      int pos = arity - 1;
      while (pos >= 0 && ++args[static_cast<std::size_t>(pos)] == n) {
        args[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
    tables.push_back(std::move(table));
  }
  return FiniteAlgebra(name, h.signature(), std::move(labels), std::move(tables));
}

/// Z3 with permuted carrier and letter labels; isomorphic but not equal.
inline FiniteAlgebra make_z3_relabeled() {
  return permute_algebra(make_z3(), {1, 0, 2}, {"a", "b", "c"}, "Z3r");
}

inline std::vector<const char*> group_fixture_names() { return {"Z2", "Z3", "Z2^2", "Z3r"}; }

}  // namespace halmos::fixtures

namespace halmos::oracle {

/// Term evaluation written from the definition, independent of the library
/// recursion: look the head up, evaluate arguments, index the table.
inline int naive_eval_term(const Term& t, const std::map<std::string, int>& env,
                           const FiniteAlgebra& h) {
  if (t.is_variable()) return env.at(t.head());
  std::size_t idx = 0;
  for (const Term& a : t.args()) {
    idx = idx * static_cast<std::size_t>(h.size()) +
          static_cast<std::size_t>(naive_eval_term(a, env, h));
  }
  return h.table(h.signature().index_of(t.head()))[idx];
}

/// Plain nested-loop Tarskian satisfaction over an explicit environment.
inline bool naive_sat(const Formula& u, std::map<std::string, int> env, const FiniteAlgebra& h) {
  switch (u.kind()) {
    case FormulaKind::Equality:
      return naive_eval_term(u.lhs(), env, h) == naive_eval_term(u.rhs(), env, h);
    case FormulaKind::Not:
      return !naive_sat(u.child(), env, h);
    case FormulaKind::And:
      return naive_sat(u.left(), env, h) && naive_sat(u.right(), env, h);
    case FormulaKind::Or:
      return naive_sat(u.left(), env, h) || naive_sat(u.right(), env, h);
    case FormulaKind::Exists:
      for (int a = 0; a < h.size(); ++a) {
        env[u.variable()] = a;
        if (naive_sat(u.child(), env, h)) return true;
      }
      return false;
    case FormulaKind::Forall:
      for (int a = 0; a < h.size(); ++a) {
        env[u.variable()] = a;
        if (!naive_sat(u.child(), env, h)) return false;
      }
      return true;
  }
  return false;
}

/// Truth set by brute force, one membership bit per point index.
inline std::vector<bool> naive_val(const Formula& u, const VariableSet& x,
                                   const FiniteAlgebra& h) {
  std::uint64_t m = 1;
  for (int k = 0; k < x.size(); ++k) m *= static_cast<std::uint64_t>(h.size());
  std::vector<bool> bits(static_cast<std::size_t>(m));
  for (std::uint64_t i = 0; i < m; ++i) {
    std::map<std::string, int> env;
    std::uint64_t rest = i;
    for (int k = 0; k < x.size(); ++k) {
      env[x.name(k)] = static_cast<int>(rest % static_cast<std::uint64_t>(h.size()));
      rest /= static_cast<std::uint64_t>(h.size());
    }
    bits[static_cast<std::size_t>(i)] = naive_sat(u, env, h);
  }
  return bits;
}

inline bool same_bits(const std::vector<bool>& bits, const PointSet& set) {
  if (bits.size() != set.space_size()) return false;
  for (std::uint64_t i = 0; i < set.space_size(); ++i) {
    if (bits[static_cast<std::size_t>(i)] != set.test(i)) return false;
  }
  return true;
}

/// Automorphisms by filtering every carrier permutation against the tables,
/// independent of the backtracking search.
inline std::vector<std::vector<int>> permutation_automorphisms(const FiniteAlgebra& h) {
  std::vector<int> perm(static_cast<std::size_t>(h.size()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> found;
  do {
    bool ok = true;
    for (std::size_t op = 0; op < h.signature().size() && ok; ++op) {
      const int arity = h.signature().operation(static_cast<int>(op)).arity;
      std::vector<int> args(static_cast<std::size_t>(arity), 0);
      while (ok) {
        std::vector<int> mapped;
        for (int a : args) mapped.push_back(perm[static_cast<std::size_t>(a)]);
        ok = perm[static_cast<std::size_t>(h.apply(static_cast<int>(op), args))] ==
             h.apply(static_cast<int>(op), mapped);
        int pos = arity - 1;
        while (pos >= 0 && ++args[static_cast<std::size_t>(pos)] == h.size()) {
          args[static_cast<std::size_t>(pos)] = 0;
          --pos;
        }
        if (pos < 0) break;
      }
    }
    if (ok) found.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return found;
}

/// Orbit partition from the permutation filter above; returns sorted orbits
/// of point indices, ordered by smallest member.
inline std::vector<std::vector<std::uint64_t>> permutation_orbits(const FiniteAlgebra& h,
                                                                  const VariableSet& x) {
  const auto perms = permutation_automorphisms(h);
  std::uint64_t m = 1;
  for (int k = 0; k < x.size(); ++k) m *= static_cast<std::uint64_t>(h.size());
  std::vector<bool> seen(static_cast<std::size_t>(m));
  std::vector<std::vector<std::uint64_t>> orbits;
  for (std::uint64_t i = 0; i < m; ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    std::vector<std::uint64_t> orbit;
    for (const auto& perm : perms) {
      std::uint64_t rest = i;
      std::uint64_t image = 0;
      std::uint64_t weight = 1;
      for (int k = 0; k < x.size(); ++k) {
        const int v = static_cast<int>(rest % static_cast<std::uint64_t>(h.size()));
        rest /= static_cast<std::uint64_t>(h.size());
        image += weight * static_cast<std::uint64_t>(perm[static_cast<std::size_t>(v)]);
        weight *= static_cast<std::uint64_t>(h.size());
      }
      if (!seen[static_cast<std::size_t>(image)]) {
        seen[static_cast<std::size_t>(image)] = true;
        orbit.push_back(image);
      }
    }
    std::sort(orbit.begin(), orbit.end());
    orbits.push_back(std::move(orbit));
  }
  return orbits;
}

/// Deterministic random point set over the space of the given set.
inline PointSet random_pointset(const VariableSet& x, const FiniteAlgebra& h,
                                std::mt19937& rng) {
  PointSet s(x, &h);
  std::bernoulli_distribution coin(0.5);
  for (std::uint64_t i = 0; i < s.space_size(); ++i) {
    if (coin(rng)) s.set(i);
  }
  return s;
}

}  // namespace halmos::oracle
