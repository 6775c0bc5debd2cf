#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace halmos;
using namespace halmos::fixtures;

namespace {

SpecialFormula special(const std::string& text, const VariableSet& x, const Signature& sig) {
  return specialize(parse_formula(text, &sig), x);
}

}  // namespace

TEST_CASE("type membership is Tarskian satisfaction at the point") {
  const FiniteAlgebra z2 = make_z2();
  const FiniteAlgebra z3 = make_z3();
  const Signature& sig = z3.signature();
  const VariableSet x = VariableSet::user({"x"});

  CHECK(in_type(special("x = x", x, sig), Point(x, &z3, {2})));

  // 1 is a double in Z3 (2+2 = 1) but 1 never doubles to 0 in Z2
  CHECK(in_type(special("exists _y1. add(_y1, _y1) = x", x, sig), Point(x, &z3, {1})));
  CHECK(!in_type(special("!(add(x, x) = e)", x, sig), Point(x, &z2, {1})));

  // a formula over fewer variables reads cylindrically at a wider point,
  // but a free variable the point does not bind is an error
  const VariableSet xy = VariableSet::user({"x", "y"});
  CHECK(in_type(special("x = x", x, sig), Point(xy, &z3, {0, 0})));
  CHECK_THROWS_AS(in_type(special("add(x, y) = e", xy, sig), Point(x, &z3, {0})),
                  MismatchError);
}

TEST_CASE("the kernel criterion agrees with direct membership") {
  const std::vector<FiniteAlgebra> algebras = {make_z2(), make_z3(), make_l2()};
  const VariableSet x = VariableSet::user({"x"});
  for (const FiniteAlgebra& h : algebras) {
    const FormulaPool pool = generate_pool(h.signature(), x);
    for (std::size_t i = 0; i < pool.formulas.size(); i += 5) {
      const SpecialFormula u = specialize(pool.formulas[i], x);
      for (int c = 0; c < h.size(); ++c) {
        const Point p(x, &h, {c});
        INFO(h.name() << " : " << u.formula.str() << " at " << p.str());
        CHECK(in_type(u, p) == type_criterion_check(u, p));
      }
    }
  }
}

TEST_CASE("type equality across points and algebras") {
  const FiniteAlgebra z2 = make_z2();
  const FiniteAlgebra z3 = make_z3();
  const VariableSet x = VariableSet::user({"x"});
  const VariableSet xy = VariableSet::user({"x", "y"});

  // negation swaps 1 and 2, so the two generators of Z3 share a type
  CHECK(types_equal(Point(x, &z3, {1}), Point(x, &z3, {2})));
  CHECK(!types_equal(Point(x, &z3, {0}), Point(x, &z3, {1})));

  // no isomorphism between carriers of different size
  CHECK(!types_equal(Point(x, &z2, {1}), Point(x, &z3, {1})));

  // tuples conjugate coordinatewise
  CHECK(types_equal(Point(xy, &z3, {1, 2}), Point(xy, &z3, {2, 1})));
  CHECK(!types_equal(Point(xy, &z3, {1, 2}), Point(xy, &z3, {1, 1})));

  CHECK_THROWS_AS(types_equal(Point(x, &z3, {1}), Point(xy, &z3, {1, 2})),
                  MismatchError);

  const TypeHandle t{Point(x, &z3, {1})};
  CHECK(t.contains(special("!(x = e)", x, z3.signature())));
  CHECK(!t.contains(special("x = e", x, z3.signature())));
}

TEST_CASE("type-based solution sets") {
  const FiniteAlgebra z3 = make_z3();
  const Signature& sig = z3.signature();
  const VariableSet x = VariableSet::user({"x"});

  std::vector<SpecialFormula> stock;
  stock.push_back(special("!(x = e)", x, sig));
  CHECK(mt_solutions(stock, x, z3).members() == std::vector<std::uint64_t>{1, 2});

  // adding a formula the whole line satisfies changes nothing
  stock.push_back(special("exists _y1. add(_y1, _y1) = x", x, sig));
  CHECK(mt_solutions(stock, x, z3).members() == std::vector<std::uint64_t>{1, 2});

  CHECK(mt_solutions({}, x, z3).all());

  // against the logical route, formula by formula
  const FormulaPool pool = generate_pool(sig, x);
  for (std::size_t i = 0; i < pool.formulas.size(); i += 9) {
    const SpecialFormula u = specialize(pool.formulas[i], x);
    FormulaPool single;
    single.formulas.push_back(u.formula);
    INFO(u.formula.str());
    CHECK(mt_solutions({u}, x, z3) == lg_solutions(single, x, z3));
  }
}

TEST_CASE("orbit decomposition partitions the space") {
  const std::vector<FiniteAlgebra> algebras = {make_z2(), make_z3(), make_l2(),
                                               make_z2sq()};
  for (const FiniteAlgebra& h : algebras) {
    for (int width = 1; width <= 2; ++width) {
      const VariableSet x =
          width == 1 ? VariableSet::user({"x"}) : VariableSet::user({"x", "y"});
      const auto orbits = orbit_decomposition(h, x);
      const auto expected = oracle::permutation_orbits(h, x);
      INFO(h.name() << " over " << width << " variables");
      REQUIRE(orbits.size() == expected.size());
      for (std::size_t i = 0; i < orbits.size(); ++i) {
        CHECK(orbits[i].members() == expected[i]);
      }
    }
  }

  CHECK(orbit_decomposition(make_z2(), VariableSet::user({"x"})).size() == 2);
  CHECK(orbit_decomposition(make_z3(), VariableSet::user({"x"})).size() == 2);
  CHECK(orbit_decomposition(make_z3(), VariableSet::user({"x", "y"})).size() == 5);
  CHECK(orbit_decomposition(make_z2sq(), VariableSet::user({"x"})).size() == 2);
}

TEST_CASE("saturation holds with a checkable certificate") {
  const FiniteAlgebra z2 = make_z2();
  const FiniteAlgebra z3 = make_z3();
  const FiniteAlgebra l2 = make_l2();
  const VariableSet x = VariableSet::user({"x"});

  auto verify = [&](const FiniteAlgebra& h, std::vector<std::vector<std::uint64_t>> want) {
    const SaturationResult r = is_lg_saturated(h, x);
    INFO(h.name());
    CHECK(r.saturated);
    REQUIRE(r.atoms.size() == want.size());
    PointSet covered(x, &h);
    for (std::size_t i = 0; i < r.atoms.size(); ++i) {
      const SaturationAtom& a = r.atoms[i];
      CHECK(a.atom.members() == want[i]);
      // each atom is definable, holds its representative, and is exactly
      // the closure of that one realizing point
      CHECK(lg_closure(a.atom) == a.atom);
      CHECK(a.atom.contains(a.representative));
      PointSet seed(x, &h);
      seed.add(a.representative);
      CHECK(lg_closure(seed) == a.atom);
      CHECK(meet(covered, a.atom).none());
      covered = join(covered, a.atom);
    }
    CHECK(covered.all());
    CHECK(r.to_record().find("verdict: saturated") == 0);
  };

  verify(z2, {{0}, {1}});
  verify(z3, {{0}, {1, 2}});
  verify(l2, {{0}, {1}});
}

TEST_CASE("every finite algebra is logically homogeneous") {
  const std::vector<FiniteAlgebra> algebras = {make_z2(), make_z3(), make_l2(),
                                               make_z2sq()};
  const std::vector<std::size_t> aut_sizes = {1, 2, 1, 6};
  for (std::size_t k = 0; k < algebras.size(); ++k) {
    const FiniteAlgebra& h = algebras[k];
    for (int width = 1; width <= 2; ++width) {
      const VariableSet x =
          width == 1 ? VariableSet::user({"x"}) : VariableSet::user({"x", "y"});
      const HomogeneityResult r = is_logically_homogeneous(h, x);
      INFO(h.name() << " over " << width << " variables");
      CHECK(r.homogeneous);
      CHECK(r.automorphism_count == aut_sizes[k]);
      const std::uint64_t m = PointSet(x, &h).space_size();
      CHECK(r.pairs_checked == m * (m + 1) / 2);
      CHECK(r.equal_type_pairs >= m);
      CHECK(!r.counterexample_p);
      CHECK(r.to_record().find("verdict: homogeneous") == 0);
    }
  }
}

TEST_CASE("types separate points exactly as the pool does on one variable") {
  const std::vector<FiniteAlgebra> algebras = {make_z2(), make_z3(), make_l2(),
                                               make_z2sq()};
  const VariableSet x = VariableSet::user({"x"});
  for (const FiniteAlgebra& h : algebras) {
    const FormulaPool pool = generate_pool(h.signature(), x);
    std::vector<SpecialFormula> stock;
    for (const Formula& u : pool.formulas) stock.push_back(specialize(u, x));
    for (int a = 0; a < h.size(); ++a) {
      for (int b = 0; b < h.size(); ++b) {
        const Point p(x, &h, {a});
        const Point q(x, &h, {b});
        bool agree = true;
        for (const SpecialFormula& u : stock) {
          agree = agree && in_type(u, p) == in_type(u, q);
        }
        INFO(h.name() << " points " << a << " and " << b);
        CHECK(types_equal(p, q) == agree);
      }
    }
  }
}

TEST_CASE("isotypy verdicts") {
  const FiniteAlgebra z2 = make_z2();
  const FiniteAlgebra z3 = make_z3();
  const FiniteAlgebra z3r = make_z3_relabeled();

  SECTION("an algebra is isotypic to itself and to relabelings") {
    const IsotypyVerdict same = are_isotypic(z3, z3);
    CHECK(same.isotypic);
    CHECK(same.global_isomorphism);
    CHECK(!same.witness_point);

    const IsotypyVerdict relabeled = are_isotypic(z3, z3r);
    CHECK(relabeled.isotypic);
    CHECK(relabeled.global_isomorphism);
    CHECK(relabeled.max_arity == 3);
    CHECK(relabeled.to_record().find("verdict: isotypic_up_to(3)") == 0);
  }

  SECTION("distinguished algebras come with a verifiable witness") {
    const IsotypyVerdict v = are_isotypic(z2, z3);
    CHECK(!v.isotypic);
    CHECK(!v.global_isomorphism);
    REQUIRE(v.witness_point);
    REQUIRE(v.witness_formula);

    // the witness formula holds at the witness point in its own algebra and
    // nowhere on the corresponding space of the other
    const bool in_first = v.witness_algebra == z2.name();
    const FiniteAlgebra& home = in_first ? z2 : z3;
    const FiniteAlgebra& away = in_first ? z3 : z2;
    const VariableSet& wx = v.witness_point->variables;
    const PointSet at_home = val(*v.witness_formula, wx, home);
    CHECK(at_home.contains(*v.witness_point));
    CHECK(val(*v.witness_formula, wx, away).none());
    CHECK(v.to_record().find("verdict: distinguished") == 0);
  }

  SECTION("a power is distinguished from its base") {
    const FiniteAlgebra z2sq = make_z2sq();
    const IsotypyVerdict v = are_isotypic(z2, z2sq);
    CHECK(!v.isotypic);
    REQUIRE(v.witness_point);
    const bool in_first = v.witness_algebra == z2.name();
    const FiniteAlgebra& home = in_first ? z2 : z2sq;
    const FiniteAlgebra& away = in_first ? z2sq : z2;
    const VariableSet& wx = v.witness_point->variables;
    CHECK(val(*v.witness_formula, wx, home).contains(*v.witness_point));
    CHECK(val(*v.witness_formula, wx, away).none());
  }

  SECTION("input guards") {
    CHECK_THROWS_AS(are_isotypic(z2, z3, 0), MismatchError);
    CHECK_THROWS_AS(are_isotypic(z2, make_l2()), MismatchError);
  }
}

TEST_CASE("local isomorphism by bounded generation") {
  const FiniteAlgebra z2 = make_z2();
  const FiniteAlgebra z3 = make_z3();
  const FiniteAlgebra z3sq = direct_power(make_z3(), 2);

  const LocalIsoResult same = locally_isomorphic(z3, z3, 2);
  CHECK(same.locally_isomorphic);
  CHECK(same.forward);
  CHECK(same.backward);
  CHECK(!same.witness);

  const LocalIsoResult diff = locally_isomorphic(z2, z3, 2);
  CHECK(!diff.locally_isomorphic);
  REQUIRE(diff.witness);

  // Z3 embeds into its square on the diagonal, but the square spans nine
  // elements from two generators and nine do not fit in three
  const LocalIsoResult power = locally_isomorphic(z3, z3sq, 2);
  CHECK(power.forward);
  CHECK(!power.backward);
  CHECK(!power.locally_isomorphic);
  REQUIRE(power.witness);
  CHECK(power.witness->direction == "backward");
  CHECK(power.witness->subalgebra_size == 9);
  CHECK(!power.table.empty());
}

TEST_CASE("isotypic pairs are locally isomorphic") {
  const FiniteAlgebra z3 = make_z3();
  const FiniteAlgebra z3r = make_z3_relabeled();
  REQUIRE(are_isotypic(z3, z3r).isotypic);
  CHECK(locally_isomorphic(z3, z3r, 2).locally_isomorphic);
}

TEST_CASE("homogeneous isotypic pairs are isomorphic") {
  // every fixture is homogeneous, so isotypy must land on an isomorphism
  const std::vector<FiniteAlgebra> algebras = {make_z2(), make_z3(), make_z2sq(),
                                               make_z3_relabeled()};
  const VariableSet x = VariableSet::user({"x"});
  for (const FiniteAlgebra& a : algebras) {
    for (const FiniteAlgebra& b : algebras) {
      REQUIRE(is_logically_homogeneous(a, x).homogeneous);
      const IsotypyVerdict v = are_isotypic(a, b);
      INFO(a.name() << " against " << b.name());
      CHECK(v.isotypic == v.global_isomorphism);
    }
  }
}
