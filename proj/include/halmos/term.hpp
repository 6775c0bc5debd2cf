#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "halmos/algebra.hpp"
#include "halmos/errors.hpp"

namespace halmos {

/// An ordered, duplicate-free list of variable names.  Order is load-bearing:
/// it fixes the coordinate layout of point spaces.  Names starting with "_y"
/// form a reserved namespace for machine-introduced bound variables; user
/// variable sets must stay out of it (see `user`).
class VariableSet {
 public:
  VariableSet() = default;

  explicit VariableSet(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty()) throw MismatchError("empty variable name");
      for (std::size_t j = i + 1; j < names_.size(); ++j) {
        if (names_[i] == names_[j]) throw MismatchError("duplicate variable " + names_[i]);
      }
    }
  }

  /// Like the constructor, but additionally rejects reserved names.
  static VariableSet user(std::vector<std::string> names) {
    for (const auto& n : names) {
      if (is_reserved(n)) {
        throw MismatchError("variable " + n + " lies in the reserved _y namespace");
      }
    }
    return VariableSet(std::move(names));
  }

  static bool is_reserved(std::string_view name) {
    return name.size() >= 2 && name[0] == '_' && name[1] == 'y';
  }

  static std::string reserve_name(int k) { return "_y" + std::to_string(k); }

  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int index) const { return names_[static_cast<std::size_t>(index)]; }

  int index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return static_cast<int>(i);
    }
    return -1;
  }

  bool contains(std::string_view name) const { return index_of(name) >= 0; }

  VariableSet extended(const std::string& extra) const {
    std::vector<std::string> names = names_;
    names.push_back(extra);
    return VariableSet(std::move(names));
  }

  bool operator==(const VariableSet& other) const = default;

 private:
  std::vector<std::string> names_;
};

/// Immutable first-order term: a variable or an operation applied to
/// subterms (constants are applications of arity 0).  Copies share nodes.
class Term {
 public:
  static Term variable(std::string name) {
    return Term(std::make_shared<const Node>(Node{true, std::move(name), {}}));
  }

  static Term apply(std::string op, std::vector<Term> args = {}) {
    return Term(std::make_shared<const Node>(Node{false, std::move(op), std::move(args)}));
  }

  bool is_variable() const { return node_->is_var; }
  const std::string& head() const { return node_->head; }
  const std::vector<Term>& args() const { return node_->args; }

  int depth() const {
    if (node_->is_var || node_->args.empty()) return 0;
    int d = 0;
    for (const Term& a : node_->args) d = std::max(d, a.depth());
    return d + 1;
  }

  bool operator==(const Term& other) const {
    if (node_ == other.node_) return true;
    if (node_->is_var != other.node_->is_var || node_->head != other.node_->head) return false;
    if (node_->args.size() != other.node_->args.size()) return false;
    for (std::size_t i = 0; i < node_->args.size(); ++i) {
      if (!(node_->args[i] == other.node_->args[i])) return false;
    }
    return true;
  }

  std::string str() const {
    std::string out;
    print(out);
    return out;
  }

 private:
  struct Node {
    bool is_var;
    std::string head;
    std::vector<Term> args;
  };

  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  void print(std::string& out) const {
    out += node_->head;
    if (!node_->is_var && !node_->args.empty()) {
      out += '(';
      for (std::size_t i = 0; i < node_->args.size(); ++i) {
        if (i > 0) out += ", ";
        node_->args[i].print(out);
      }
      out += ')';
    }
  }

  std::shared_ptr<const Node> node_;
};

/// Variables of t in order of first occurrence, appended to `out` without
/// duplicates.
inline void collect_variables(const Term& t, std::vector<std::string>& out) {
  if (t.is_variable()) {
    for (const auto& v : out) {
      if (v == t.head()) return;
    }
    out.push_back(t.head());
    return;
  }
  for (const Term& a : t.args()) collect_variables(a, out);
}

/// A point: an assignment of carrier elements to the variables of X, i.e.
/// one element of the affine space over the algebra.
struct Point {
  VariableSet variables;
  const FiniteAlgebra* algebra = nullptr;
  std::vector<int> values;

  Point() = default;

  Point(VariableSet vars, const FiniteAlgebra* alg, std::vector<int> vals)
      : variables(std::move(vars)), algebra(alg), values(std::move(vals)) {
    if (!algebra) throw MismatchError("point without an algebra");
    if (static_cast<int>(values.size()) != variables.size()) {
      throw MismatchError("point has " + std::to_string(values.size()) + " values for " +
                          std::to_string(variables.size()) + " variables");
    }
    for (int v : values) {
      if (v < 0 || v >= algebra->size()) throw MismatchError("point value out of range");
    }
  }

  int value_of(std::string_view var) const {
    const int i = variables.index_of(var);
    if (i < 0) throw MismatchError("point does not bind variable " + std::string(var));
    return values[static_cast<std::size_t>(i)];
  }

  /// "x=1, y=0" in variable order.
  std::string str() const {
    std::string out;
    for (int i = 0; i < variables.size(); ++i) {
      if (i > 0) out += ", ";
      out += variables.name(i);
      out += '=';
      out += algebra->label(values[static_cast<std::size_t>(i)]);
    }
    return out;
  }

  bool operator==(const Point& other) const {
    return variables == other.variables && values == other.values &&
           (algebra == other.algebra ||
            (algebra && other.algebra && same_algebra(*algebra, *other.algebra)));
  }
};

/// Value of the term at the point.  Unknown variables and operation symbols
/// are errors, as are arity mismatches.
inline int evaluate(const Term& t, const Point& p) {
  if (t.is_variable()) return p.value_of(t.head());
  const int op = p.algebra->signature().index_of(t.head());
  if (op < 0) throw MismatchError("unknown operation " + t.head());
  std::vector<int> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(evaluate(a, p));
  return p.algebra->apply(op, args);
}

/// A simultaneous substitution: each domain variable receives a term over
/// the codomain variables.
struct Substitution {
  VariableSet domain;
  VariableSet codomain;
  std::vector<Term> images;

  Substitution() = default;

  Substitution(VariableSet dom, VariableSet cod, std::vector<Term> images_)
      : domain(std::move(dom)), codomain(std::move(cod)), images(std::move(images_)) {
    if (static_cast<int>(images.size()) != domain.size()) {
      throw MismatchError("substitution has " + std::to_string(images.size()) + " images for " +
                          std::to_string(domain.size()) + " variables");
    }
    for (const Term& t : images) {
      std::vector<std::string> vars;
      collect_variables(t, vars);
      for (const auto& v : vars) {
        if (!codomain.contains(v)) {
          throw MismatchError("substitution image uses " + v + " outside its codomain");
        }
      }
    }
  }

  static Substitution identity(const VariableSet& vars) {
    std::vector<Term> images;
    for (const auto& n : vars.names()) images.push_back(Term::variable(n));
    return Substitution(vars, vars, std::move(images));
  }

  const Term& image_of(std::string_view var) const {
    const int i = domain.index_of(var);
    if (i < 0) throw MismatchError("substitution does not cover variable " + std::string(var));
    return images[static_cast<std::size_t>(i)];
  }
};

/// Replace each variable of t by its image.  Every variable of t must lie in
/// the domain.
inline Term apply_substitution(const Substitution& s, const Term& t) {
  if (t.is_variable()) return s.image_of(t.head());
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(apply_substitution(s, a));
  return Term::apply(t.head(), std::move(args));
}

/// The point over s.domain obtained by evaluating each image at p, i.e. the
/// composite assignment p o s.  p must be a point over s.codomain.
inline Point compose(const Point& p, const Substitution& s) {
  if (!(p.variables == s.codomain)) {
    throw MismatchError("point space disagrees with substitution codomain");
  }
  std::vector<int> values;
  values.reserve(static_cast<std::size_t>(s.domain.size()));
  for (const Term& t : s.images) values.push_back(evaluate(t, p));
  return Point(s.domain, p.algebra, std::move(values));
}

/// Does the equation w = w2 hold at p?
inline bool kernel_contains(const Point& p, const Term& w, const Term& w2) {
  return evaluate(w, p) == evaluate(w2, p);
}

/// All terms over the given variables up to the depth bound (variables and
/// constants have depth 0), deduplicated structurally, ordered depth-first
/// by construction: depth layer by layer, within a layer by operation order
/// and argument indices.
inline std::vector<Term> enumerate_terms(const Signature& sig, const VariableSet& vars,
                                         int max_depth, std::size_t max_count = 200000) {
  std::vector<Term> all;
  std::vector<int> depth_of;
  std::map<std::string, std::size_t> seen;

  auto push = [&](const Term& t, int d) {
    const std::string key = t.str();
    if (seen.contains(key)) return;
    if (all.size() >= max_count) {
      throw ResourceError("term enumeration exceeds " + std::to_string(max_count) + " terms");
    }
    seen[key] = all.size();
    all.push_back(t);
    depth_of.push_back(d);
  };

  for (const auto& v : vars.names()) push(Term::variable(v), 0);
  for (const auto& op : sig.operations()) {
    if (op.arity == 0) push(Term::apply(op.name), 0);
  }

  for (int d = 1; d <= max_depth; ++d) {
    const std::size_t limit = all.size();  // terms of depth < d
    if (limit == 0) break;
    for (const auto& op : sig.operations()) {
      if (op.arity == 0) continue;
      std::vector<std::size_t> pick(static_cast<std::size_t>(op.arity), 0);
      while (true) {
        // at least one argument must sit at depth d-1, otherwise the
        // application already appeared in an earlier layer
        bool fresh = false;
        for (std::size_t i = 0; i < pick.size(); ++i) {
          if (depth_of[pick[i]] == d - 1) fresh = true;
        }
        if (fresh) {
          std::vector<Term> args;
          for (std::size_t i = 0; i < pick.size(); ++i) args.push_back(all[pick[i]]);
          push(Term::apply(op.name, std::move(args)), d);
        }
        int pos = op.arity - 1;
        while (pos >= 0 && ++pick[static_cast<std::size_t>(pos)] == limit) {
          pick[static_cast<std::size_t>(pos)] = 0;
          --pos;
        }
        if (pos < 0) break;
      }
    }
  }
  return all;
}

}  // namespace halmos
