#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "halmos/algebra.hpp"
#include "halmos/errors.hpp"
#include "halmos/formula.hpp"
#include "halmos/galois.hpp"
#include "halmos/pointset.hpp"
#include "halmos/pool.hpp"
#include "halmos/semantics.hpp"
#include "halmos/term.hpp"

namespace halmos {

namespace detail {

inline int eval_term_env(const Term& t, const std::map<std::string, int>& env,
                         const FiniteAlgebra& h) {
  if (t.is_variable()) {
    auto it = env.find(t.head());
    if (it == env.end()) throw MismatchError("unbound variable '" + t.head() + "'");
    return it->second;
  }
  const int op = h.signature().index_of(t.head());
  if (op < 0) throw MismatchError("unknown operation '" + t.head() + "'");
  std::vector<int> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(eval_term_env(a, env, h));
  return h.apply(op, args);
}

inline bool tarski_sat(const Formula& u, std::map<std::string, int>& env,
                       const FiniteAlgebra& h) {
  switch (u.kind()) {
    case FormulaKind::Equality:
      return eval_term_env(u.lhs(), env, h) == eval_term_env(u.rhs(), env, h);
    case FormulaKind::Not:
      return !tarski_sat(u.child(), env, h);
    case FormulaKind::And:
      return tarski_sat(u.left(), env, h) && tarski_sat(u.right(), env, h);
    case FormulaKind::Or:
      return tarski_sat(u.left(), env, h) || tarski_sat(u.right(), env, h);
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      const bool exists = u.kind() == FormulaKind::Exists;
      const std::string& name = u.variable();
      auto it = env.find(name);
      std::optional<int> saved;
      if (it != env.end()) saved = it->second;
      bool result = !exists;
      for (int a = 0; a < h.size(); ++a) {
        env[name] = a;
        const bool sat = tarski_sat(u.child(), env, h);
        if (sat == exists) {
          result = exists;
          break;
        }
      }
      if (saved) {
        env[name] = *saved;
      } else {
        env.erase(name);
      }
      return result;
    }
  }
  throw Error("unhandled formula kind");
}

}  // namespace detail

/// Does the special formula u belong to the type of the point p?  Tarskian
/// satisfaction: free variables are bound to p's values, reserved bound
/// variables range over the carrier.
inline bool in_type(const SpecialFormula& u, const Point& p) {
  if (!is_x_special(u.formula, p.variables)) {
    throw MismatchError("formula is not special over the point's variables");
  }
  std::map<std::string, int> env;
  for (int k = 0; k < p.variables.size(); ++k) {
    env[p.variables.name(k)] = p.values[static_cast<std::size_t>(k)];
  }
  return detail::tarski_sat(u.formula, env, *p.algebra);
}

/// The other side of the type criterion: translate u along the identity
/// substitution on the point's variables (which renames every binder into
/// fresh reserve variables) and test membership in the logical kernel.
/// Must agree with in_type; exported so the agreement can be tested.
inline bool type_criterion_check(const SpecialFormula& u, const Point& p) {
  if (!is_x_special(u.formula, p.variables)) {
    throw MismatchError("formula is not special over the point's variables");
  }
  const Substitution s = Substitution::identity(p.variables);
  return in_lker(substitute_formula(s, u.formula), p);
}

/// A point type, held intensionally by its realizing point.  The type is an
/// infinite set of special formulas; membership is in_type.
struct TypeHandle {
  Point point;

  bool contains(const SpecialFormula& u) const { return in_type(u, point); }
};

/// Do two points, possibly in different algebras, have the same type?  In
/// the finite case this reduces to an isomorphism carrying one image tuple
/// onto the other.
inline bool types_equal(const Point& p, const Point& q) {
  if (!(p.variables == q.variables)) {
    throw MismatchError("points over different variable sets have incomparable types");
  }
  return find_pair_isomorphism(*p.algebra, p.values, *q.algebra, q.values).has_value();
}

/// Points whose type contains every formula of the stock.
inline PointSet mt_solutions(const std::vector<SpecialFormula>& stock, const VariableSet& x,
                             const FiniteAlgebra& h) {
  PointSet r = PointSet::full(x, &h);
  for (const SpecialFormula& u : stock) {
    if (!is_x_special(u.formula, x)) {
      throw MismatchError("stock formula is not special over the target space");
    }
    for (std::uint64_t i = 0; i < r.space_size(); ++i) {
      if (r.test(i) && !in_type(u, decode(i, x, h))) r.set(i, false);
    }
  }
  return r;
}

/// Partition of the affine space into orbits of the automorphism group,
/// acting on points coordinatewise.  Orbits are ordered by their smallest
/// point index.
inline std::vector<PointSet> orbit_decomposition(const FiniteAlgebra& h, const VariableSet& x) {
  const std::vector<ElementMap> auts = automorphisms(h);
  std::vector<PointSet> orbits;
  PointSet seen(x, &h);
  for (std::uint64_t i = 0; i < seen.space_size(); ++i) {
    if (seen.test(i)) continue;
    PointSet orbit(x, &h);
    const Point p = decode(i, x, h);
    for (const ElementMap& sigma : auts) {
      std::vector<int> values = p.values;
      for (int& v : values) v = sigma(v);
      orbit.set(encode(Point(x, &h, std::move(values))));
    }
    seen = join(seen, orbit);
    orbits.push_back(std::move(orbit));
  }
  return orbits;
}

struct SaturationAtom {
  PointSet atom;
  Point representative;
};

struct SaturationResult {
  bool saturated = true;
  std::vector<SaturationAtom> atoms;

  std::string to_record() const {
    std::string out = "verdict: ";
    out += saturated ? "saturated" : "not_saturated";
    out += "\natoms: " + std::to_string(atoms.size()) + "\n";
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      out += "certificate: atom " + std::to_string(i) + ": card " +
             std::to_string(atoms[i].atom.count()) + ", representative " +
             atoms[i].representative.str() + "\n";
    }
    return out;
  }
};

/// Is every ultrafilter over the theory the logical kernel of a point?  The
/// algebra of definable sets is finite, so this reduces to checking that
/// each of its atoms (the orbits) holds a realizing point.  The certificate
/// lists the atoms with representatives.
inline SaturationResult is_lg_saturated(const FiniteAlgebra& h, const VariableSet& x) {
  SaturationResult result;
  for (PointSet& orbit : orbit_decomposition(h, x)) {
    if (orbit.none()) {
      result.saturated = false;
      continue;
    }
    const Point rep = decode(orbit.members().front(), x, h);
    result.atoms.push_back(SaturationAtom{std::move(orbit), rep});
  }
  return result;
}

struct HomogeneityResult {
  bool homogeneous = true;
  std::uint64_t pairs_checked = 0;
  std::uint64_t equal_type_pairs = 0;
  std::size_t automorphism_count = 0;
  std::optional<Point> counterexample_p;
  std::optional<Point> counterexample_q;

  std::string to_record() const {
    std::string out = "verdict: ";
    out += homogeneous ? "homogeneous" : "not_homogeneous";
    out += "\npairs_checked: " + std::to_string(pairs_checked);
    out += "\nequal_type_pairs: " + std::to_string(equal_type_pairs);
    out += "\nautomorphisms: " + std::to_string(automorphism_count) + "\n";
    if (counterexample_p) {
      out += "counterexample_p: " + counterexample_p->str() + "\n";
      out += "counterexample_q: " + counterexample_q->str() + "\n";
    }
    return out;
  }
};

/// Equal types if and only if conjugate under an automorphism: true for
/// every finite algebra, verified constructively pair by pair.
inline HomogeneityResult is_logically_homogeneous(const FiniteAlgebra& h, const VariableSet& x) {
  const std::vector<ElementMap> auts = automorphisms(h);
  HomogeneityResult result;
  result.automorphism_count = auts.size();
  const std::uint64_t m =
      checked_pow(static_cast<std::uint64_t>(h.size()), x.size(), "affine space");
  for (std::uint64_t i = 0; i < m && result.homogeneous; ++i) {
    const Point p = decode(i, x, h);
    for (std::uint64_t j = i; j < m; ++j) {
      const Point q = decode(j, x, h);
      const bool same_type = types_equal(p, q);
      bool conjugate = false;
      for (const ElementMap& sigma : auts) {
        bool matches = true;
        for (std::size_t k = 0; k < p.values.size() && matches; ++k) {
          matches = sigma(p.values[k]) == q.values[k];
        }
        if (matches) {
          conjugate = true;
          break;
        }
      }
      ++result.pairs_checked;
      if (same_type) ++result.equal_type_pairs;
      if (same_type != conjugate) {
        result.homogeneous = false;
        result.counterexample_p = p;
        result.counterexample_q = q;
        break;
      }
    }
  }
  return result;
}

namespace detail {

inline Formula conj_all(const std::vector<Formula>& parts) {
  Formula out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = Formula::conj(out, parts[i]);
  return out;
}

inline Formula disj_all(const std::vector<Formula>& parts) {
  Formula out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = Formula::disj(out, parts[i]);
  return out;
}

/// A formula true exactly at the points whose pair (algebra, image tuple)
/// is isomorphic to (H, p): reserve variables enumerate the carrier, the
/// conjunction pins the whole operation table, distinctness and a covering
/// disjunction force the enumeration to be a bijection, and the free
/// variables are tied to their images.
inline Formula characterizing_formula(const Point& p) {
  const FiniteAlgebra& h = *p.algebra;
  const int n = h.size();
  std::vector<Term> y;
  y.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) y.push_back(Term::variable(VariableSet::reserve_name(i + 1)));

  std::vector<Formula> parts;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      parts.push_back(Formula::negated(Formula::equal(y[static_cast<std::size_t>(i)],
                                                      y[static_cast<std::size_t>(j)])));
    }
  }
  for (std::size_t op = 0; op < h.signature().size(); ++op) {
    const Operation& o = h.signature().operation(static_cast<int>(op));
    std::vector<int> args(static_cast<std::size_t>(o.arity), 0);
    while (true) {
      std::vector<Term> arg_terms;
      for (int a : args) arg_terms.push_back(y[static_cast<std::size_t>(a)]);
      const int value = h.apply(static_cast<int>(op), args);
      parts.push_back(Formula::equal(Term::apply(o.name, std::move(arg_terms)),
                                     y[static_cast<std::size_t>(value)]));
      int pos = o.arity - 1;
      while (pos >= 0 && ++args[static_cast<std::size_t>(pos)] == n) {
        args[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
  }
  for (int k = 0; k < p.variables.size(); ++k) {
    parts.push_back(
        Formula::equal(Term::variable(p.variables.name(k)),
                       y[static_cast<std::size_t>(p.values[static_cast<std::size_t>(k)])]));
  }

  const std::string z = VariableSet::reserve_name(n + 1);
  std::vector<Formula> cover;
  for (int i = 0; i < n; ++i) {
    cover.push_back(Formula::equal(Term::variable(z), y[static_cast<std::size_t>(i)]));
  }
  Formula body = Formula::conj(conj_all(parts), Formula::forall(z, disj_all(cover)));
  for (int i = n; i >= 1; --i) body = Formula::exists(VariableSet::reserve_name(i), body);
  return body;
}

}  // namespace detail

struct IsotypyVerdict {
  bool isotypic = false;
  int max_arity = 0;
  bool global_isomorphism = false;
  std::string witness_algebra;
  std::optional<Point> witness_point;
  std::optional<Formula> witness_formula;
  std::string witness_source;

  std::string to_record() const {
    std::string out = "verdict: ";
    out += isotypic ? "isotypic_up_to(" + std::to_string(max_arity) + ")" : "distinguished";
    out += "\nglobal_isomorphism: ";
    out += global_isomorphism ? "true" : "false";
    out += "\n";
    if (witness_point) {
      out += "witness_algebra: " + witness_algebra + "\n";
      out += "witness_point: " + witness_point->str() + "\n";
      out += "witness_formula: " + witness_formula->str() + "\n";
      out += "witness_source: " + witness_source + "\n";
    }
    return out;
  }
};

/// Do two algebras realize the same point types on every space of at most
/// max_arity variables?  The bounded pointwise check and a direct
/// isomorphism search both run; for finite algebras they must agree, since
/// a single type-equal pairing already extends to an isomorphism.  On a
/// distinguished pair the verdict carries a point whose type the other
/// algebra misses, plus a separating formula: first a small one scavenged
/// from the generated pool, else the point's atomic diagram, else the
/// characterizing formula, which always separates.
inline IsotypyVerdict are_isotypic(const FiniteAlgebra& h1, const FiniteAlgebra& h2,
                                   int max_arity = 3) {
  if (max_arity < 1) throw MismatchError("max_arity must be at least 1");
  if (!(h1.signature() == h2.signature())) {
    throw MismatchError("signature mismatch between " + h1.name() + " and " + h2.name());
  }

  IsotypyVerdict verdict;
  verdict.max_arity = max_arity;
  verdict.global_isomorphism =
      find_pair_isomorphism(h1, std::span<const int>{}, h2, std::span<const int>{}).has_value();

  std::vector<Point> failures;  // points without a type-equal partner
  std::vector<const FiniteAlgebra*> failure_side;
  bool bounded = true;
  for (int k = 1; k <= max_arity; ++k) {
    std::vector<std::string> names;
    for (int i = 1; i <= k; ++i) names.push_back("x" + std::to_string(i));
    const VariableSet x = VariableSet::user(names);
    for (const auto& [src, dst] : {std::pair{&h1, &h2}, std::pair{&h2, &h1}}) {
      const std::uint64_t m =
          checked_pow(static_cast<std::uint64_t>(src->size()), k, "affine space");
      const std::uint64_t m2 =
          checked_pow(static_cast<std::uint64_t>(dst->size()), k, "affine space");
      for (std::uint64_t i = 0; i < m; ++i) {
        const Point p = decode(i, x, *src);
        bool matched = false;
        for (std::uint64_t j = 0; j < m2 && !matched; ++j) {
          matched = types_equal(p, decode(j, x, *dst));
        }
        if (!matched) {
          bounded = false;
          failures.push_back(p);
          failure_side.push_back(src);
        }
      }
    }
  }

  if (bounded != verdict.global_isomorphism) {
    throw Error("bounded isotypy check disagrees with the isomorphism search");
  }
  verdict.isotypic = bounded;
  if (verdict.isotypic) return verdict;

  auto adopt = [&](std::size_t f, Formula u, const char* source) {
    verdict.witness_point = failures[f];
    verdict.witness_algebra = failure_side[f]->name();
    verdict.witness_formula = std::move(u);
    verdict.witness_source = source;
  };
  auto other = [&](std::size_t f) { return failure_side[f] == &h1 ? &h2 : &h1; };

  std::map<int, FormulaPool> pools;
  for (std::size_t f = 0; f < failures.size() && !verdict.witness_point; ++f) {
    const VariableSet& x = failures[f].variables;
    auto it = pools.find(x.size());
    if (it == pools.end()) it = pools.emplace(x.size(), generate_pool(h1.signature(), x)).first;
    for (const Formula& u : it->second.formulas) {
      bool closed_over_x = true;
      for (const std::string& name : free_variables(u)) {
        closed_over_x = closed_over_x && x.contains(name);
      }
      if (!closed_over_x) continue;
      if (!val(u, x, *failure_side[f]).test(encode(failures[f]))) continue;
      if (val(u, x, *other(f)).none()) {
        adopt(f, specialize(u, x).formula, "pool");
        break;
      }
    }
  }
  for (std::size_t f = 0; f < failures.size() && !verdict.witness_point; ++f) {
    const Formula d = atomic_diagram(failures[f]);
    if (val(d, failures[f].variables, *other(f)).none()) adopt(f, d, "atomic-diagram");
  }
  if (!verdict.witness_point) {
    const Formula chi = detail::characterizing_formula(failures.front());
    if (!val(chi, failures.front().variables, *other(0)).none()) {
      throw Error("characterizing formula failed to separate the pair");
    }
    adopt(0, chi, "characterizing-formula");
  }
  return verdict;
}

struct LocalIsoEntry {
  std::string direction;
  std::string seed;
  std::size_t subalgebra_size = 0;
  bool embeds = false;
};

struct LocalIsoResult {
  bool locally_isomorphic = true;
  bool forward = true;
  bool backward = true;
  std::vector<LocalIsoEntry> table;
  std::optional<LocalIsoEntry> witness;

  std::string to_record() const {
    std::string out = "verdict: ";
    out += locally_isomorphic ? "locally_isomorphic" : "not_locally_isomorphic";
    out += "\nforward: ";
    out += forward ? "true" : "false";
    out += "\nbackward: ";
    out += backward ? "true" : "false";
    out += "\n";
    if (witness) {
      out += "witness_seed: " + witness->direction + " {" + witness->seed + "}\n";
    }
    for (const LocalIsoEntry& e : table) {
      out += "certificate: " + e.direction + " seed {" + e.seed + "} generates " +
             std::to_string(e.subalgebra_size) + " embeds " + (e.embeds ? "true" : "false") +
             "\n";
    }
    return out;
  }
};

/// Does every subalgebra generated by at most max_generators elements on
/// one side have an isomorphic copy on the other, both ways?  Brute force
/// over seed combinations, deduplicated by the subalgebra they span.
inline LocalIsoResult locally_isomorphic(const FiniteAlgebra& h1, const FiniteAlgebra& h2,
                                         int max_generators) {
  if (!(h1.signature() == h2.signature())) {
    throw MismatchError("signature mismatch between " + h1.name() + " and " + h2.name());
  }

  LocalIsoResult result;
  auto scan = [&](const FiniteAlgebra& src, const FiniteAlgebra& dst, const char* direction,
                  bool& passed) {
    std::set<std::vector<int>> spanned;
    std::vector<std::vector<int>> seeds;
    if (!generated_subalgebra(src, {}).empty()) seeds.push_back({});
    for (int k = 1; k <= max_generators && k <= src.size(); ++k) {
      std::vector<int> seed(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) seed[static_cast<std::size_t>(i)] = i;
      while (true) {
        seeds.push_back(seed);
        int pos = k - 1;
        while (pos >= 0 && seed[static_cast<std::size_t>(pos)] == src.size() - k + pos) --pos;
        if (pos < 0) break;
        ++seed[static_cast<std::size_t>(pos)];
        for (int i = pos + 1; i < k; ++i) {
          seed[static_cast<std::size_t>(i)] = seed[static_cast<std::size_t>(i - 1)] + 1;
        }
      }
    }
    for (const std::vector<int>& seed : seeds) {
      const std::vector<int> carrier = generated_subalgebra(src, seed);
      if (!spanned.insert(carrier).second) continue;
      const FiniteAlgebra sub = restrict_to(src, carrier);
      LocalIsoEntry entry;
      entry.direction = direction;
      for (std::size_t i = 0; i < seed.size(); ++i) {
        if (i > 0) entry.seed += ", ";
        entry.seed += src.label(seed[i]);
      }
      entry.subalgebra_size = carrier.size();
      entry.embeds = find_embedding(sub, dst).has_value();
      if (!entry.embeds) {
        passed = false;
        if (!result.witness) result.witness = entry;
      }
      result.table.push_back(std::move(entry));
    }
  };
  scan(h1, h2, "forward", result.forward);
  scan(h2, h1, "backward", result.backward);
  result.locally_isomorphic = result.forward && result.backward;
  return result;
}

}  // namespace halmos
