#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "halmos/halmos.hpp"

namespace {

using namespace halmos;

struct Session {
  std::vector<std::string> algebra_paths;
  std::vector<std::string> var_names;
  std::string formula_text;
  std::string pool_path;
  std::vector<std::string> points_args;
  std::string sub_text;
  std::string kind = "lg";
  int max_arity = 3;
  int max_generators = 2;
  int depth = 3;
  std::uint64_t budget = 0;
  bool record = false;
};

VariableSet session_vars(const Session& s) {
  if (s.var_names.empty()) throw MismatchError("no variables given; pass --vars");
  return VariableSet::user(s.var_names);
}

FiniteAlgebra load_indexed(const Session& s, std::size_t index) {
  if (s.algebra_paths.size() <= index) {
    throw MismatchError("command needs " + std::to_string(index + 1) +
                        " algebra file(s); pass --alg");
  }
  return load_algebra(s.algebra_paths[index]);
}

/// A --points value is a file path when one exists, inline text otherwise.
std::string points_text(const std::string& arg) {
  if (std::filesystem::exists(arg)) {
    std::ifstream in(arg);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  }
  return arg;
}

PointSet load_points(const Session& s, std::size_t index, const VariableSet& x,
                     const FiniteAlgebra& h) {
  if (s.points_args.size() <= index) {
    throw MismatchError("command needs " + std::to_string(index + 1) +
                        " point list(s); pass --points");
  }
  PointSet set(x, &h);
  for (const Point& p : parse_point_list(points_text(s.points_args[index]), x, h)) {
    set.set(encode(p));
  }
  return set;
}

void print_pointset(const Session& s, const PointSet& a) {
  std::cout << "card: " << a.count() << "\n";
  if (s.record) {
    std::cout << a.serialize();
  } else {
    for (std::uint64_t i : a.members()) {
      std::cout << "member: " << decode(i, a.variables(), *a.algebra()).str() << "\n";
    }
  }
}

int cmd_eval(const Session& s) {
  const FiniteAlgebra h = load_indexed(s, 0);
  const VariableSet x = session_vars(s);
  if (s.formula_text.empty() == s.pool_path.empty()) {
    throw MismatchError("pass exactly one of --formula or --pool");
  }
  const PointSet a = s.pool_path.empty()
                         ? val(parse_formula(s.formula_text, &h.signature()), x, h)
                         : lg_solutions(load_pool_file(s.pool_path, &h.signature()), x, h);
  print_pointset(s, a);
  std::cout << "in_theory: " << (a.all() ? "true" : "false") << "\n";
  return 0;
}

int cmd_closure(const Session& s) {
  const FiniteAlgebra h = load_indexed(s, 0);
  const VariableSet x = session_vars(s);
  const PointSet a = load_points(s, 0, x, h);
  PointSet closed(x, &h);
  if (s.kind == "ag") {
    AgOptions opt;
    opt.approximate_fallback = true;
    opt.fallback_term_depth = s.depth;
    const ClosureResult r = ag_closure(a, opt);
    closed = r.set;
    std::cout << "exact: " << (r.exact ? "true" : "false") << "\n";
  } else if (s.kind == "lg") {
    closed = lg_closure(a);
  } else if (s.kind == "mt") {
    closed = mt_closure(a);
  } else {
    throw MismatchError("unknown closure kind '" + s.kind + "'; use ag, lg or mt");
  }
  print_pointset(s, closed);
  std::cout << "definable: " << (is_definable(closed) ? "true" : "false") << "\n";
  return 0;
}

int cmd_isotypic(const Session& s) {
  const FiniteAlgebra h1 = load_indexed(s, 0);
  const FiniteAlgebra h2 = load_indexed(s, 1);
  std::cout << are_isotypic(h1, h2, s.max_arity).to_record();
  return 0;
}

int cmd_orbits(const Session& s) {
  const FiniteAlgebra h = load_indexed(s, 0);
  const VariableSet x = session_vars(s);
  const std::vector<PointSet> orbits = orbit_decomposition(h, x);
  std::cout << "count: " << orbits.size() << "\n";
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    std::cout << "orbit " << i << ": card " << orbits[i].count() << ", representative "
              << decode(orbits[i].members().front(), x, h).str() << "\n";
    if (s.record) std::cout << orbits[i].serialize();
  }
  return 0;
}

int cmd_homogeneous(const Session& s) {
  const FiniteAlgebra h = load_indexed(s, 0);
  std::cout << is_logically_homogeneous(h, session_vars(s)).to_record();
  return 0;
}

int cmd_saturated(const Session& s) {
  const FiniteAlgebra h = load_indexed(s, 0);
  std::cout << is_lg_saturated(h, session_vars(s)).to_record();
  return 0;
}

int cmd_subst(const Session& s) {
  const FiniteAlgebra h = load_indexed(s, 0);
  const Substitution sub = parse_substitution(s.sub_text, &h.signature());
  const Formula u = parse_formula(s.formula_text, &h.signature());
  std::cout << substitute_formula(sub, u).str() << "\n";
  return 0;
}

int cmd_specialize(const Session& s) {
  std::optional<Signature> sig;
  if (!s.algebra_paths.empty()) sig = load_indexed(s, 0).signature();
  const Formula u = parse_formula(s.formula_text, sig ? &*sig : nullptr);
  std::cout << specialize(u, session_vars(s)).formula.str() << "\n";
  return 0;
}

int cmd_morphism(const Session& s) {
  const FiniteAlgebra h = load_indexed(s, 0);
  const VariableSet x = session_vars(s);
  const Substitution sub = parse_substitution(s.sub_text, &h.signature(), &x);
  const PointSet a = load_points(s, 0, x, h);
  const PointSet b = load_points(s, 1, sub.domain, h);
  std::cout << "morphism: " << (is_category_morphism(sub, a, b) ? "true" : "false") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-algebra logical geometry toolkit"};
  app.require_subcommand(1);

  Session s;
  if (const char* env = std::getenv("HALMOS_BUDGET")) {
    s.budget = std::strtoull(env, nullptr, 10);
  }

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--alg", s.algebra_paths, "algebra file (repeat where two are needed)");
    cmd->add_option("--vars", s.var_names, "variable names of the affine space");
    cmd->add_option("--budget", s.budget, "point space size budget");
    cmd->add_flag("--record", s.record, "machine-readable output");
    return cmd;
  };

  CLI::App* eval = add_common(app.add_subcommand("eval", "truth set of a formula or pool"));
  CLI::Option* eval_formula =
      eval->add_option("formula,--formula", s.formula_text, "formula in the DSL")->required();
  eval->add_option("--pool", s.pool_path, "formula pool file, one formula per line");
  // A required positional keeps the greedy --vars list from swallowing the
  // formula; with --pool on the command line the formula becomes optional.
  for (int i = 1; i < argc; ++i) {
    const std::string_view arg = argv[i];
    if (arg == "--pool" || arg.rfind("--pool=", 0) == 0) eval_formula->required(false);
  }

  CLI::App* closure = add_common(app.add_subcommand("closure", "double-turn closure of a point list"));
  closure->add_option("--kind", s.kind, "ag, lg or mt");
  closure->add_option("--points", s.points_args, "point list (file path or inline)")->required();
  closure->add_option("--depth", s.depth, "term depth of the approximate ag fallback");

  CLI::App* isotypic = add_common(app.add_subcommand("isotypic", "type comparison of two algebras"));
  isotypic->add_option("alg1", s.algebra_paths, "two algebra files")->expected(2);
  isotypic->add_option("--max-arity", s.max_arity, "largest space arity checked");

  add_common(app.add_subcommand("orbits", "automorphism orbits of the affine space"));
  add_common(app.add_subcommand("homogeneous", "equal types versus conjugacy"));
  add_common(app.add_subcommand("saturated", "atoms of the definable-set algebra"));

  CLI::App* subst = add_common(app.add_subcommand("subst", "apply a substitution to a formula"));
  subst->add_option("formula,--formula", s.formula_text, "formula in the DSL")->required();
  subst->add_option("--sub", s.sub_text, "substitution, e.g. \"x := add(x, y)\"")->required();

  CLI::App* special = add_common(app.add_subcommand("specialize", "rename binders into the reserve"));
  special->add_option("formula,--formula", s.formula_text, "formula in the DSL")->required();

  CLI::App* morphism = add_common(app.add_subcommand("morphism", "affine map membership check"));
  morphism->add_option("--sub", s.sub_text, "substitution defining the map")->required();
  morphism->add_option("--points", s.points_args, "source then target point list")->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (s.budget > 0) set_space_budget(s.budget);
    if (eval->parsed()) return cmd_eval(s);
    if (closure->parsed()) return cmd_closure(s);
    if (isotypic->parsed()) return cmd_isotypic(s);
    if (app.get_subcommand("orbits")->parsed()) return cmd_orbits(s);
    if (app.get_subcommand("homogeneous")->parsed()) return cmd_homogeneous(s);
    if (app.get_subcommand("saturated")->parsed()) return cmd_saturated(s);
    if (subst->parsed()) return cmd_subst(s);
    if (special->parsed()) return cmd_specialize(s);
    if (morphism->parsed()) return cmd_morphism(s);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const MismatchError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
