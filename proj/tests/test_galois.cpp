#include <random>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace halmos;
using namespace halmos::fixtures;

namespace {

PointSet points_over(const VariableSet& x, const FiniteAlgebra& h,
                     std::initializer_list<std::uint64_t> indices) {
  PointSet s(x, &h);
  for (auto i : indices) s.set(i);
  return s;
}

FormulaPool pool_of(const Signature& sig, std::initializer_list<const char*> texts) {
  FormulaPool pool;
  for (const char* t : texts) pool.formulas.push_back(parse_formula(t, &sig));
  return pool;
}

}  // namespace

TEST_CASE("equation systems cut out their solution sets") {
  const FiniteAlgebra z3 = make_z3();
  const Signature& sig = z3.signature();
  const VariableSet x = VariableSet::user({"x"});

  EquationSet t;
  t.pairs.emplace_back(parse_term("add(x, x)", &sig), parse_term("e", &sig));
  CHECK(ag_solutions(t, x, z3).members() == std::vector<std::uint64_t>{0});

  t.pairs.emplace_back(parse_term("x", &sig), parse_term("e", &sig));
  CHECK(ag_solutions(t, x, z3).members() == std::vector<std::uint64_t>{0});

  CHECK(ag_solutions(EquationSet{}, x, z3).all());
}

TEST_CASE("pools cut out their solution sets") {
  const FiniteAlgebra z2 = make_z2();
  const FiniteAlgebra z3 = make_z3();
  const Signature& sig = z3.signature();
  const VariableSet x = VariableSet::user({"x"});
  const FormulaPool pool = pool_of(sig, {"!(x = e)", "!(add(x, x) = e)"});

  // doubling pins nothing away from zero in Z3, but kills everything in Z2
  CHECK(lg_solutions(pool, x, z3).members() == std::vector<std::uint64_t>{1, 2});
  CHECK(lg_solutions(pool, x, z2).none());

  CHECK(lg_solutions(FormulaPool{}, x, z3).all());
}

TEST_CASE("the upper set of a point set") {
  const FiniteAlgebra z3 = make_z3();
  const Signature& sig = z3.signature();
  const VariableSet x = VariableSet::user({"x"});
  const PointSet a = points_over(x, z3, {1, 2});

  CHECK(lg_up_contains(a, parse_formula("!(x = e)", &sig)));
  CHECK(!lg_up_contains(a, parse_formula("x = e", &sig)));
  CHECK(lg_up_contains(a, parse_formula("add(x, add(x, x)) = e", &sig)));
}

TEST_CASE("logical closure saturates under automorphisms") {
  const FiniteAlgebra z2 = make_z2();
  const FiniteAlgebra z3 = make_z3();
  const VariableSet x = VariableSet::user({"x"});

  // Z2 is rigid, so every set is closed
  const PointSet one2 = points_over(x, z2, {1});
  CHECK(lg_closure(one2) == one2);
  CHECK(is_definable(one2));

  // negation swaps 1 and 2 in Z3
  const PointSet one3 = points_over(x, z3, {1});
  CHECK(lg_closure(one3).members() == std::vector<std::uint64_t>{1, 2});
  CHECK(!is_definable(one3));
  CHECK(is_definable(points_over(x, z3, {1, 2})));
  CHECK(is_definable(points_over(x, z3, {0})));

  CHECK(lg_closure(PointSet::full(x, &z3)).all());
  CHECK(lg_closure(PointSet::empty(x, &z3)).none());

  // the same action moves pairs coordinatewise
  const VariableSet xy = VariableSet::user({"x", "y"});
  const PointSet pair = points_over(xy, z3, {encode(Point(xy, &z3, {1, 2}))});
  const PointSet swapped = lg_closure(pair);
  CHECK(swapped.count() == 2);
  CHECK(swapped.contains(Point(xy, &z3, {2, 1})));
  CHECK(!is_definable(pair));
  CHECK(is_definable(swapped));
}

TEST_CASE("equational closure over the group fixtures") {
  const FiniteAlgebra z2 = make_z2();
  const FiniteAlgebra z3 = make_z3();
  const VariableSet x = VariableSet::user({"x"});

  // the only unary term functions are 0, x and 2x, so no equation separates
  // a nonzero point from the rest of the line
  const ClosureResult c2 = ag_closure(points_over(x, z2, {1}));
  CHECK(c2.exact);
  CHECK(c2.set.all());
  CHECK(ag_closure(points_over(x, z3, {1})).set.all());

  // zero is pinned by x = e
  CHECK(ag_closure(points_over(x, z3, {0})).set.members() == std::vector<std::uint64_t>{0});

  // (1,2) satisfies x + y = 0, and that is all it satisfies
  const VariableSet xy = VariableSet::user({"x", "y"});
  const PointSet seed = points_over(xy, z3, {encode(Point(xy, &z3, {1, 2}))});
  CHECK(ag_closure(seed).set.members() == std::vector<std::uint64_t>{0, 5, 7});

  // empty input closes to the empty set by convention
  CHECK(ag_closure(PointSet::empty(x, &z3)).set.none());
}

TEST_CASE("equational closure with constants can pin singletons") {
  const FiniteAlgebra l2 = make_l2();
  const VariableSet x = VariableSet::user({"x"});
  CHECK(ag_closure(points_over(x, l2, {1})).set.members() == std::vector<std::uint64_t>{1});
  CHECK(ag_closure(points_over(x, l2, {0})).set.members() == std::vector<std::uint64_t>{0});
}

TEST_CASE("the term route agrees with the product route") {
  const FiniteAlgebra z2 = make_z2();
  const FiniteAlgebra z3 = make_z3();
  const FiniteAlgebra z2sq = make_z2sq();
  const FiniteAlgebra l2 = make_l2();
  const VariableSet x = VariableSet::user({"x"});
  const VariableSet xy = VariableSet::user({"x", "y"});

  std::mt19937 rng(1229);
  for (const FiniteAlgebra* h : {&z2, &z3, &z2sq, &l2}) {
    for (const VariableSet* vars : {&x, &xy}) {
      for (int round = 0; round < 8; ++round) {
        const PointSet a = oracle::random_pointset(*vars, *h, rng);
        INFO(h->name() << " over " << vars->size() << " variables, round " << round);
        CHECK(ag_closure(a).set == ag_closure_by_terms(a));
      }
    }
  }
}

TEST_CASE("closure budget and fallback") {
  const FiniteAlgebra z3 = make_z3();
  const VariableSet x = VariableSet::user({"x"});
  const PointSet a = points_over(x, z3, {1});

  AgOptions tight;
  tight.max_elements = 1;
  CHECK_THROWS_AS(ag_closure(a, tight), ResourceError);

  tight.approximate_fallback = true;
  const ClosureResult fallback = ag_closure(a, tight);
  CHECK(!fallback.exact);
  CHECK(fallback.set == ag_closure_by_terms(a));
}

TEST_CASE("the model route coincides with the logical route") {
  const FiniteAlgebra z3 = make_z3();
  const VariableSet x = VariableSet::user({"x"});
  std::mt19937 rng(4021);
  for (int round = 0; round < 10; ++round) {
    const PointSet a = oracle::random_pointset(x, z3, rng);
    const PointSet m = mt_closure(a);
    CHECK(m == lg_closure(a));
    CHECK(mt_closure(m) == m);
  }
}

TEST_CASE("closure laws hold on random sets") {
  const FiniteAlgebra z3 = make_z3();
  const FiniteAlgebra z2sq = make_z2sq();
  const VariableSet x = VariableSet::user({"x"});
  const VariableSet xy = VariableSet::user({"x", "y"});
  std::mt19937 rng(65537);

  auto sample = [&](const FiniteAlgebra& h, const VariableSet& vars) {
    for (int round = 0; round < 6; ++round) {
      PointSet a = oracle::random_pointset(vars, h, rng);
      PointSet b = join(a, oracle::random_pointset(vars, h, rng));  // a subset of b

      const PointSet la = lg_closure(a);
      const PointSet ga = ag_closure(a).set;
      INFO(h.name() << " over " << vars.size() << " variables, round " << round);

      // extensive, idempotent, monotone
      CHECK(a.is_subset_of(la));
      CHECK(a.is_subset_of(ga));
      CHECK(lg_closure(la) == la);
      CHECK(ag_closure(ga).set == ga);
      CHECK(la.is_subset_of(lg_closure(b)));
      CHECK(ga.is_subset_of(ag_closure(b).set));

      // every formula is available to the logical side, so it closes tighter
      CHECK(la.is_subset_of(ga));
    }
  };
  sample(z3, x);
  sample(z3, xy);
  sample(z2sq, x);
}

TEST_CASE("antitone correspondence between sets and theories") {
  const FiniteAlgebra z3 = make_z3();
  const VariableSet x = VariableSet::user({"x"});
  const FormulaPool pool = generate_pool(z3.signature(), x);
  std::mt19937 rng(99);

  for (int round = 0; round < 5; ++round) {
    const PointSet a = oracle::random_pointset(x, z3, rng);
    const PointSet b = join(a, oracle::random_pointset(x, z3, rng));
    for (const Formula& u : pool.formulas) {
      // everything true of the larger set is true of the smaller
      if (lg_up_contains(b, u)) CHECK(lg_up_contains(a, u));
    }
  }
}

TEST_CASE("value tables are unions of automorphism orbits") {
  const FiniteAlgebra z3 = make_z3();
  const VariableSet xy = VariableSet::user({"x", "y"});
  const FormulaPool pool = generate_pool(z3.signature(), xy);
  for (std::size_t i = 0; i < pool.formulas.size(); i += 7) {
    const PointSet v = val(pool.formulas[i], xy, z3);
    INFO(pool.formulas[i].str());
    CHECK(lg_closure(v) == v);
  }
}

TEST_CASE("morphisms between point sets") {
  const FiniteAlgebra z2 = make_z2();
  const Signature& sig = z2.signature();
  const VariableSet x = VariableSet::user({"x"});
  const VariableSet y = VariableSet::user({"y"});

  const Substitution s = parse_substitution("y := add(x, x)", &sig, &x);
  const PointSet a = PointSet::full(x, &z2);
  const PointSet zero = points_over(y, z2, {0});
  const PointSet one = points_over(y, z2, {1});

  CHECK(is_category_morphism(s, a, zero));
  CHECK(!is_category_morphism(s, a, one));
  // spaces must line up with the substitution
  CHECK_THROWS_AS(is_category_morphism(s, zero, zero), MismatchError);
  CHECK_THROWS_AS(is_category_morphism(Substitution::identity(x), a, zero), MismatchError);
}

TEST_CASE("finite witnesses for pool solution sets") {
  const FiniteAlgebra z3 = make_z3();
  const Signature& sig = z3.signature();
  const VariableSet x = VariableSet::user({"x"});

  const FormulaPool redundant = pool_of(
      sig, {"x = x", "!(x = e)", "add(x, add(x, x)) = e", "!(add(x, x) = e)", "!(x = e)"});
  const FormulaPool witness = noetherian_witness(redundant, x, z3);
  REQUIRE(witness.formulas.size() == 1);
  CHECK(witness.formulas[0] == redundant.formulas[1]);
  CHECK(lg_solutions(witness, x, z3) == lg_solutions(redundant, x, z3));
  CHECK(witness.parameters == "witness of 5 formulas");

  // a generated stock shrinks to at most one formula per point removed
  const FormulaPool stock = generate_pool(sig, x);
  const FormulaPool small = noetherian_witness(stock, x, z3);
  CHECK(small.formulas.size() <= 3);
  CHECK(lg_solutions(small, x, z3) == lg_solutions(stock, x, z3));
}
