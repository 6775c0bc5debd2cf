#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "halmos/errors.hpp"
#include "halmos/term.hpp"

namespace halmos {

enum class FormulaKind { Equality, Not, And, Or, Exists, Forall };

/// Immutable formula tree over equalities of terms, the Boolean connectives
/// and the two quantifiers.  Implication is parser sugar and never appears
/// here.  Copies share nodes.
class Formula {
 public:
  static Formula equal(Term lhs, Term rhs) {
    return Formula(std::make_shared<const Node>(
        Node{FormulaKind::Equality, {std::move(lhs), std::move(rhs)}, {}, {}}));
  }

  static Formula negated(Formula f) {
    return Formula(std::make_shared<const Node>(
        Node{FormulaKind::Not, {}, {std::move(f)}, {}}));
  }

  static Formula conj(Formula a, Formula b) {
    return Formula(std::make_shared<const Node>(
        Node{FormulaKind::And, {}, {std::move(a), std::move(b)}, {}}));
  }

  static Formula disj(Formula a, Formula b) {
    return Formula(std::make_shared<const Node>(
        Node{FormulaKind::Or, {}, {std::move(a), std::move(b)}, {}}));
  }

  static Formula exists(std::string var, Formula f) {
    return Formula(std::make_shared<const Node>(
        Node{FormulaKind::Exists, {}, {std::move(f)}, std::move(var)}));
  }

  static Formula forall(std::string var, Formula f) {
    return Formula(std::make_shared<const Node>(
        Node{FormulaKind::Forall, {}, {std::move(f)}, std::move(var)}));
  }

  FormulaKind kind() const { return node_->kind; }

  const Term& lhs() const { return node_->terms[0]; }
  const Term& rhs() const { return node_->terms[1]; }

  /// Child of Not / Exists / Forall.
  const Formula& child() const { return node_->children[0]; }

  const Formula& left() const { return node_->children[0]; }
  const Formula& right() const { return node_->children[1]; }

  /// Bound variable of a quantifier node.
  const std::string& variable() const { return node_->var; }

  bool is_quantifier() const {
    return node_->kind == FormulaKind::Exists || node_->kind == FormulaKind::Forall;
  }

  bool operator==(const Formula& other) const {
    if (node_ == other.node_) return true;
    if (node_->kind != other.node_->kind || node_->var != other.node_->var) return false;
    if (node_->terms.size() != other.node_->terms.size()) return false;
    for (std::size_t i = 0; i < node_->terms.size(); ++i) {
      if (!(node_->terms[i] == other.node_->terms[i])) return false;
    }
    if (node_->children.size() != other.node_->children.size()) return false;
    for (std::size_t i = 0; i < node_->children.size(); ++i) {
      if (!(node_->children[i] == other.node_->children[i])) return false;
    }
    return true;
  }

  /// DSL text that parses back to this formula.  Precedence: ! binds
  /// tightest, then &, then |; quantifiers reach as far right as possible.
  std::string str() const {
    std::string out;
    print(out, 0);
    return out;
  }

 private:
  struct Node {
    FormulaKind kind;
    std::vector<Term> terms;      // Equality only
    std::vector<Formula> children;
    std::string var;              // quantifiers only
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  // levels: 0 = bare (quantifier allowed), 1 = inside |, 2 = inside &, 3 = inside !
  void print(std::string& out, int level) const {
    switch (node_->kind) {
      case FormulaKind::Equality:
        out += lhs().str();
        out += " = ";
        out += rhs().str();
        return;
      case FormulaKind::Not:
        // always parenthesize: "!x = e" would read as a negated term
        out += "!(";
        child().print(out, 0);
        out += ')';
        return;
      case FormulaKind::And: {
        const bool parens = level >= 3;
        if (parens) out += '(';
        left().print(out, 2);
        out += " & ";
        right().print(out, 2);
        if (parens) out += ')';
        return;
      }
      case FormulaKind::Or: {
        const bool parens = level >= 2;
        if (parens) out += '(';
        left().print(out, 1);
        out += " | ";
        right().print(out, 1);
        if (parens) out += ')';
        return;
      }
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        const bool parens = level >= 1;
        if (parens) out += '(';
        out += node_->kind == FormulaKind::Exists ? "exists " : "forall ";
        out += node_->var;
        out += ". ";
        child().print(out, 0);
        if (parens) out += ')';
        return;
      }
    }
  }

  std::shared_ptr<const Node> node_;
};

namespace detail {

inline void free_variables_rec(const Formula& f, std::vector<std::string>& bound,
                               std::vector<std::string>& out) {
  auto add_free = [&](const std::string& v) {
    for (const auto& b : bound) {
      if (b == v) return;
    }
    for (const auto& o : out) {
      if (o == v) return;
    }
    out.push_back(v);
  };
  switch (f.kind()) {
    case FormulaKind::Equality: {
      std::vector<std::string> vars;
      collect_variables(f.lhs(), vars);
      collect_variables(f.rhs(), vars);
      for (const auto& v : vars) add_free(v);
      return;
    }
    case FormulaKind::Not:
      free_variables_rec(f.child(), bound, out);
      return;
    case FormulaKind::And:
    case FormulaKind::Or:
      free_variables_rec(f.left(), bound, out);
      free_variables_rec(f.right(), bound, out);
      return;
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      bound.push_back(f.variable());
      free_variables_rec(f.child(), bound, out);
      bound.pop_back();
      return;
  }
}

}  // namespace detail

/// Free variables in order of first (free) occurrence.
inline std::vector<std::string> free_variables(const Formula& f) {
  std::vector<std::string> bound;
  std::vector<std::string> out;
  detail::free_variables_rec(f, bound, out);
  return out;
}

/// Is every free variable in X and every binder a reserved variable?
inline bool is_x_special(const Formula& f, const VariableSet& x) {
  for (const auto& v : free_variables(f)) {
    if (!x.contains(v)) return false;
  }
  struct Walk {
    static bool binders_reserved(const Formula& f) {
      switch (f.kind()) {
        case FormulaKind::Equality:
          return true;
        case FormulaKind::Not:
          return binders_reserved(f.child());
        case FormulaKind::And:
        case FormulaKind::Or:
          return binders_reserved(f.left()) && binders_reserved(f.right());
        case FormulaKind::Exists:
        case FormulaKind::Forall:
          return VariableSet::is_reserved(f.variable()) && binders_reserved(f.child());
      }
      return false;
    }
  };
  return Walk::binders_reserved(f);
}

namespace detail {

/// Largest k such that _yk occurs anywhere (as binder or in a term) in f,
/// or 0 when no reserved names occur.
inline int max_reserve_index_term(const Term& t) {
  int best = 0;
  std::vector<std::string> vars;
  collect_variables(t, vars);
  for (const auto& v : vars) {
    if (VariableSet::is_reserved(v)) {
      int k = 0;
      for (std::size_t i = 2; i < v.size(); ++i) {
        if (v[i] < '0' || v[i] > '9') {
          k = 0;
          break;
        }
        k = k * 10 + (v[i] - '0');
      }
      best = std::max(best, k);
    }
  }
  return best;
}

inline int max_reserve_index(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Equality:
      return std::max(max_reserve_index_term(f.lhs()), max_reserve_index_term(f.rhs()));
    case FormulaKind::Not:
      return max_reserve_index(f.child());
    case FormulaKind::And:
    case FormulaKind::Or:
      return std::max(max_reserve_index(f.left()), max_reserve_index(f.right()));
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      int k = max_reserve_index(f.child());
      const std::string& v = f.variable();
      if (VariableSet::is_reserved(v)) {
        int idx = 0;
        for (std::size_t i = 2; i < v.size(); ++i) {
          if (v[i] < '0' || v[i] > '9') {
            idx = 0;
            break;
          }
          idx = idx * 10 + (v[i] - '0');
        }
        k = std::max(k, idx);
      }
      return k;
    }
  }
  return 0;
}

inline Term rewrite_term(const Term& t, const std::map<std::string, Term>& env) {
  if (t.is_variable()) {
    auto it = env.find(t.head());
    if (it == env.end()) {
      throw MismatchError("free variable " + t.head() + " outside the substitution domain");
    }
    return it->second;
  }
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(rewrite_term(a, env));
  return Term::apply(t.head(), std::move(args));
}

inline Formula substitute_rec(const Formula& f, std::map<std::string, Term>& env, int& fresh) {
  switch (f.kind()) {
    case FormulaKind::Equality:
      return Formula::equal(rewrite_term(f.lhs(), env), rewrite_term(f.rhs(), env));
    case FormulaKind::Not:
      return Formula::negated(substitute_rec(f.child(), env, fresh));
    case FormulaKind::And:
      return Formula::conj(substitute_rec(f.left(), env, fresh),
                           substitute_rec(f.right(), env, fresh));
    case FormulaKind::Or:
      return Formula::disj(substitute_rec(f.left(), env, fresh),
                           substitute_rec(f.right(), env, fresh));
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      const std::string name = VariableSet::reserve_name(fresh++);
      auto saved = env.find(f.variable());
      Term replacement = Term::variable(name);
      Term old = replacement;
      const bool had = saved != env.end();
      if (had) old = saved->second;
      env.insert_or_assign(f.variable(), replacement);
      Formula body = substitute_rec(f.child(), env, fresh);
      if (had) {
        env.insert_or_assign(f.variable(), old);
      } else {
        env.erase(f.variable());
      }
      return f.kind() == FormulaKind::Exists ? Formula::exists(name, std::move(body))
                                             : Formula::forall(name, std::move(body));
    }
  }
  throw Error("unreachable formula kind");
}

}  // namespace detail

/// Apply s to every free occurrence in u.  Every binder is renamed to a
/// fresh reserved variable first (deterministically, in traversal order,
/// starting past any reserved index already present), so capture cannot
/// happen.  Free variables of u must lie in s.domain.
inline Formula substitute_formula(const Substitution& s, const Formula& u) {
  for (const auto& v : free_variables(u)) {
    if (!s.domain.contains(v)) {
      throw MismatchError("free variable " + v + " outside the substitution domain");
    }
  }
  int fresh = detail::max_reserve_index(u);
  for (const Term& t : s.images) fresh = std::max(fresh, detail::max_reserve_index_term(t));
  ++fresh;
  std::map<std::string, Term> env;
  for (int i = 0; i < s.domain.size(); ++i) {
    env.insert_or_assign(s.domain.name(i), s.images[static_cast<std::size_t>(i)]);
  }
  return detail::substitute_rec(u, env, fresh);
}

/// A formula certified to mention only X freely and to bind only reserved
/// variables.  Build one with `specialize` or `certify`.
struct SpecialFormula {
  Formula formula;
  VariableSet x_budget;

  static SpecialFormula certify(Formula f, VariableSet x) {
    if (!is_x_special(f, x)) {
      throw MismatchError("formula is not special over the given variables");
    }
    return SpecialFormula{std::move(f), std::move(x)};
  }
};

namespace detail {

inline Formula specialize_rec(const Formula& f, std::map<std::string, std::string>& renames,
                              int& fresh) {
  auto rewrite = [&](const Term& t) {
    struct R {
      static Term go(const Term& t, const std::map<std::string, std::string>& renames) {
        if (t.is_variable()) {
          auto it = renames.find(t.head());
          return it == renames.end() ? t : Term::variable(it->second);
        }
        std::vector<Term> args;
        args.reserve(t.args().size());
        for (const Term& a : t.args()) args.push_back(go(a, renames));
        return Term::apply(t.head(), std::move(args));
      }
    };
    return R::go(t, renames);
  };
  switch (f.kind()) {
    case FormulaKind::Equality:
      return Formula::equal(rewrite(f.lhs()), rewrite(f.rhs()));
    case FormulaKind::Not:
      return Formula::negated(specialize_rec(f.child(), renames, fresh));
    case FormulaKind::And:
      return Formula::conj(specialize_rec(f.left(), renames, fresh),
                           specialize_rec(f.right(), renames, fresh));
    case FormulaKind::Or:
      return Formula::disj(specialize_rec(f.left(), renames, fresh),
                           specialize_rec(f.right(), renames, fresh));
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      const std::string& v = f.variable();
      if (VariableSet::is_reserved(v)) {
        // already a reserve binder: keep it, but shield it from outer renames
        auto saved = renames.find(v);
        std::string old;
        const bool had = saved != renames.end();
        if (had) {
          old = saved->second;
          renames.erase(saved);
        }
        Formula body = specialize_rec(f.child(), renames, fresh);
        if (had) renames[v] = old;
        return f.kind() == FormulaKind::Exists ? Formula::exists(v, std::move(body))
                                               : Formula::forall(v, std::move(body));
      }
      const std::string name = VariableSet::reserve_name(fresh++);
      auto saved = renames.find(v);
      std::string old;
      const bool had = saved != renames.end();
      if (had) old = saved->second;
      renames[v] = name;
      Formula body = specialize_rec(f.child(), renames, fresh);
      if (had) {
        renames[v] = old;
      } else {
        renames.erase(v);
      }
      return f.kind() == FormulaKind::Exists ? Formula::exists(name, std::move(body))
                                             : Formula::forall(name, std::move(body));
    }
  }
  throw Error("unreachable formula kind");
}

}  // namespace detail

/// Equivalent special formula over X: free occurrences stay put, every
/// binder over a non-reserved variable is renamed to a fresh reserved one
/// (binders that are already reserved are kept).  Free variables of u must
/// lie in X.
inline SpecialFormula specialize(const Formula& u, const VariableSet& x) {
  for (const auto& v : free_variables(u)) {
    if (!x.contains(v)) {
      throw MismatchError("free variable " + v + " outside the declared variable set");
    }
  }
  int fresh = detail::max_reserve_index(u) + 1;
  std::map<std::string, std::string> renames;
  Formula result = detail::specialize_rec(u, renames, fresh);
  return SpecialFormula{std::move(result), x};
}

}  // namespace halmos
