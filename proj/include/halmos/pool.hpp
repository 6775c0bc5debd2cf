#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "halmos/formula.hpp"
#include "halmos/parse.hpp"
#include "halmos/semantics.hpp"
#include "halmos/term.hpp"

namespace halmos {

/// A concrete finite stock of formulas, plus a record of how it was made so
/// a run can be reproduced exactly.
struct FormulaPool {
  std::vector<Formula> formulas;
  std::string parameters;

  std::size_t size() const { return formulas.size(); }
};

/// Knobs for the deterministic pool generator.  The full closure of "every
/// formula up to this depth" is astronomically large as soon as binary
/// connectives stack, so each stage is capped and thinned by an even,
/// seed-free stride; the caps are recorded in FormulaPool::parameters.
struct PoolOptions {
  int max_formula_depth = 3;  // connective nesting; equalities sit at depth 1
  int max_term_depth = 2;
  int max_atom_terms = 12;    // distinct terms fed into equalities
  int max_atoms = 48;
  int max_layer = 160;        // cap per connective layer
  int bound_vars = 1;         // reserve variables _y1.._yk offered to quantifiers
  bool quantify = true;
};

namespace detail {

/// Keep every element when the list fits, otherwise an evenly spread
/// selection including the first element.
template <typename T>
std::vector<T> stride_select(const std::vector<T>& items, std::size_t keep) {
  if (items.size() <= keep) return items;
  std::vector<T> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    out.push_back(items[i * items.size() / keep]);
  }
  return out;
}

}  // namespace detail

/// Deterministic formula stock over the given free variables: equalities
/// over a spread of terms, then layers of negation, conjunction, disjunction
/// and both quantifiers up to the depth bound, deduplicated structurally.
/// `bound_vars` reserve variables feed the quantifier layers; formulas in
/// which one of them is still free are working material and are filtered
/// out of the result.  No randomness anywhere; two calls with equal inputs
/// give byte-identical pools.
inline FormulaPool generate_pool(const Signature& sig, const VariableSet& free_vars,
                                 PoolOptions opt = {}) {
  std::vector<std::string> names = free_vars.names();
  for (int k = 1; k <= opt.bound_vars; ++k) names.push_back(VariableSet::reserve_name(k));
  const VariableSet vars{names};

  // term stock: all variables and constants, plus a spread of deeper terms
  const std::vector<Term> all_terms = enumerate_terms(sig, vars, opt.max_term_depth);
  std::vector<Term> shallow;
  std::vector<Term> deep;
  for (const Term& t : all_terms) {
    (t.depth() == 0 ? shallow : deep).push_back(t);
  }
  std::vector<Term> terms = shallow;
  const std::size_t room =
      opt.max_atom_terms > static_cast<int>(terms.size())
          ? static_cast<std::size_t>(opt.max_atom_terms) - terms.size()
          : 0;
  for (const Term& t : detail::stride_select(deep, room)) terms.push_back(t);

  std::vector<Formula> atoms;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i; j < terms.size(); ++j) {
      if (i == j && !terms[i].is_variable()) continue;  // w = w only for variables
      atoms.push_back(Formula::equal(terms[i], terms[j]));
    }
  }
  atoms = detail::stride_select(atoms, static_cast<std::size_t>(opt.max_atoms));

  std::set<std::string> seen;
  std::vector<Formula> pool;
  auto push = [&](std::vector<Formula>& layer, const Formula& f) {
    if (seen.insert(f.str()).second) layer.push_back(f);
  };

  std::vector<Formula> previous;
  for (const Formula& a : atoms) push(previous, a);
  pool = previous;

  for (int depth = 2; depth <= opt.max_formula_depth; ++depth) {
    std::vector<Formula> layer;
    const std::vector<Formula>& lower = pool;  // everything built so far
    for (std::size_t i = 0; i < previous.size(); ++i) {
      const Formula& f = previous[i];
      push(layer, Formula::negated(f));
      if (!lower.empty()) {
        push(layer, Formula::conj(f, lower[(i * 7 + 1) % lower.size()]));
        push(layer, Formula::disj(f, lower[(i * 3 + 2) % lower.size()]));
      }
      if (opt.quantify) {
        for (const auto& v : free_variables(f)) {
          push(layer, Formula::exists(v, f));
          push(layer, Formula::forall(v, f));
        }
      }
    }
    layer = detail::stride_select(layer, static_cast<std::size_t>(opt.max_layer));
    pool.insert(pool.end(), layer.begin(), layer.end());
    previous = std::move(layer);
  }

  std::vector<Formula> stock;
  for (const Formula& f : pool) {
    bool over_free = true;
    for (const auto& v : free_variables(f)) over_free = over_free && free_vars.contains(v);
    if (over_free) stock.push_back(f);
  }

  std::ostringstream params;
  params << "depth=" << opt.max_formula_depth << " term_depth=" << opt.max_term_depth
         << " atom_terms=" << opt.max_atom_terms << " atoms=" << opt.max_atoms
         << " layer=" << opt.max_layer << " bound=" << opt.bound_vars
         << " quantify=" << (opt.quantify ? 1 : 0) << " free=";
  for (int i = 0; i < free_vars.size(); ++i) {
    if (i > 0) params << ',';
    params << free_vars.name(i);
  }
  return FormulaPool{std::move(stock), params.str()};
}

/// One formula per line; '#' starts a comment; blank lines are skipped.
inline FormulaPool load_pool(std::istream& in, const Signature* sig = nullptr) {
  FormulaPool pool;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    pool.formulas.push_back(parse_formula(line, sig, line_no));
  }
  pool.parameters = "file lines=" + std::to_string(pool.formulas.size());
  return pool;
}

inline FormulaPool load_pool_file(const std::string& path, const Signature* sig = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open pool file " + path);
  return load_pool(in, sig);
}

/// The quantifier-free formula pinning p's atomic diagram: a conjunction of
/// equalities and negated equalities, one per unordered pair of term values
/// over X up to the term depth bound.  Terms are deduplicated by their value
/// table over the whole space first, so the conjunction stays small.
inline Formula atomic_diagram(const Point& p, int term_depth = 2) {
  const VariableSet& x = p.variables;
  const FiniteAlgebra& h = *p.algebra;
  const std::vector<Term> all_terms = enumerate_terms(h.signature(), x, term_depth);

  std::vector<Term> reps;
  std::set<std::vector<int>> seen;
  PointSet probe(x, &h);
  for (const Term& t : all_terms) {
    std::vector<int> values;
    values.reserve(static_cast<std::size_t>(probe.space_size()));
    for (std::uint64_t i = 0; i < probe.space_size(); ++i) {
      values.push_back(evaluate(t, decode(i, x, h)));
    }
    if (seen.insert(std::move(values)).second) reps.push_back(t);
  }

  if (reps.empty()) throw MismatchError("no terms available to pin the atomic diagram");

  std::vector<Formula> conjuncts;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    for (std::size_t j = i + 1; j < reps.size(); ++j) {
      Formula eq = Formula::equal(reps[i], reps[j]);
      conjuncts.push_back(kernel_contains(p, reps[i], reps[j]) ? eq : Formula::negated(eq));
    }
  }
  if (conjuncts.empty()) {
    // a one-element term stock can only happen in trivial spaces; pin nothing
    return Formula::equal(reps.front(), reps.front());
  }
  Formula out = conjuncts.front();
  for (std::size_t i = 1; i < conjuncts.size(); ++i) {
    out = Formula::conj(std::move(out), conjuncts[i]);
  }
  return out;
}

}  // namespace halmos
