#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "raccess/errors.hpp"
#include "raccess/groebner.hpp"

using namespace raccess;
using namespace testing_support;

namespace {

Ideal ideal(const RegistryPtr& reg, std::initializer_list<const char*> gens) {
    std::vector<Polynomial> ps;
    for (const char* g : gens) ps.push_back(poly(g, reg));
    return Ideal(reg, ps);
}

std::vector<Polynomial> polys(const RegistryPtr& reg, std::initializer_list<const char*> gens) {
    std::vector<Polynomial> ps;
    for (const char* g : gens) ps.push_back(poly(g, reg));
    return ps;
}

RegistryPtr plain2() { return VariableRegistry::create({}, {"x1", "x2"}, {"u"}, 1); }
RegistryPtr plain3() { return VariableRegistry::create({}, {"x1", "x2", "x3"}, {"u"}, 1); }

bool all_vanish(const std::vector<Polynomial>& gens, const Assignment& p) {
    for (const auto& g : gens)
        if (g.evaluate(p) != 0) return false;
    return true;
}

} // namespace

TEST_CASE("groebner_basis examples") {
    auto reg = coil_registry();
    auto n = reg->n();
    CHECK(groebner_basis(ideal(reg, {"x1+x2", "x1-x2"}), MonomialOrder::degrevlex(n)) == polys(reg, {"x2", "x1"}));
    CHECK(groebner_basis(ideal(reg, {"x1*(x1+T*x2)"}), MonomialOrder::degrevlex(n)) ==
          polys(reg, {"x1^2 + T*x1*x2"}));
    // Lex on a small system: x1 eliminated in favour of a univariate in x2.
    auto r = plain2();
    auto lex = groebner_basis(ideal(r, {"x1^2 + x2^2 - 1", "x1 - x2"}), MonomialOrder::lex(2));
    CHECK(lex == polys(r, {"2*x2^2 - 1", "x1 - x2"}));
}

TEST_CASE("contains examples") {
    auto reg = coil_registry();
    CHECK(contains(ideal(reg, {"x1*(x1+T*x2)"}), poly("x1^2 + T*x1*x2", reg)));
    CHECK(contains(ideal(reg, {"x1", "x2"}), poly("x1*(x1+T*x2)", reg)));
    CHECK_FALSE(contains(ideal(reg, {"x1^2"}), poly("x1", reg)));
}

TEST_CASE("ideal_equal examples") {
    auto reg = coil_registry();
    CHECK(ideal_equal(ideal(reg, {"x1"}), ideal(reg, {"2*x1"})));
    CHECK(ideal_equal(ideal(reg, {"x1", "x2"}), ideal(reg, {"x1+x2", "x1-x2"})));
    CHECK_FALSE(ideal_equal(ideal(reg, {"x2*(x1+x2)"}), ideal(reg, {"x1", "x2"})));
    // Parameters are units of the coefficient field.
    CHECK(ideal_equal(ideal(reg, {"a*T^2*x1", "b*x2 - T*x1"}), ideal(reg, {"x1", "x2"})));
}

TEST_CASE("parameter conditions are reported") {
    auto reg = coil_registry();
    Ideal i = ideal(reg, {"a*T*x1 + x2", "b*x2"});
    CHECK(ideal_equal(i, ideal(reg, {"x1", "x2"})));
    const auto& conds = i.parameter_conditions();
    auto has = [&](const char* s) {
        Polynomial p = poly(s, reg);
        return std::any_of(conds.begin(), conds.end(), [&](const Polynomial& q) { return q == p; });
    };
    CHECK(has("b"));
    CHECK(has("a*T"));
}

TEST_CASE("ideal_sum examples") {
    auto reg = coil_registry();
    CHECK(ideal_equal(ideal_sum(ideal(reg, {"x1"}), ideal(reg, {"x2"})), ideal(reg, {"x1", "x2"})));
    Ideal i = ideal(reg, {"x1*(x1+T*x2)"});
    CHECK(ideal_equal(ideal_sum(i, Ideal::zero(reg)), i));
    Ideal heur = Ideal(reg, {poly("x2", reg)}, Certification::heuristic);
    CHECK(ideal_sum(i, heur).certification() == Certification::heuristic);
}

TEST_CASE("intersection and vanishing ideals") {
    auto r = plain2();
    Ideal a = ideal(r, {"x1"});
    Ideal b = ideal(r, {"x2"});
    CHECK(ideal_equal(intersect(a, b), ideal(r, {"x1*x2"})));
    Ideal v = vanishing_ideal(r, {{1, 0}, {-1, 0}});
    CHECK(ideal_equal(v, ideal(r, {"x1^2 - 1", "x2"})));
    CHECK(vanishing_ideal(r, {}).is_unit());
}

TEST_CASE("dimension and quotient") {
    auto r = plain2();
    CHECK(ideal(r, {"x1^2", "x2"}).quotient_dimension() == std::optional<std::size_t>(2));
    CHECK_FALSE(ideal(r, {"x2*(x1+x2)"}).is_zero_dimensional());
    CHECK(Ideal::unit(r).quotient_dimension() == std::optional<std::size_t>(0));
    Ideal rad = zero_dim_radical(ideal(r, {"x1^3 - x1^2", "x2^2"}));
    CHECK(ideal_equal(rad, ideal(r, {"x1^2 - x1", "x2"})));
}

TEST_CASE("radical_heuristic examples") {
    auto r = plain2();
    auto a = radical_heuristic(ideal(r, {"x2^2*(x1+x2)^2"}));
    CHECK(a.certified);
    CHECK(ideal_equal(a.ideal, ideal(r, {"x2*(x1+x2)"})));

    auto b = radical_heuristic(ideal(r, {"x1^2", "x2"}));
    CHECK(b.certified);
    CHECK(ideal_equal(b.ideal, ideal(r, {"x1", "x2"})));

    auto c = radical_heuristic(ideal(r, {"x1^2 + x2^2"}));
    CHECK(c.certified);
    CHECK(ideal_equal(c.ideal, ideal(r, {"x1", "x2"})));

    auto d = radical_heuristic(ideal(r, {"x1^2 + 1"}));
    CHECK(d.certified);
    CHECK(d.ideal.is_unit());

    auto e = radical_heuristic(ideal(r, {"x1^4 + x2^4 + x1^2*x2^2"}));
    CHECK(e.certified);
    CHECK(ideal_equal(e.ideal, ideal(r, {"x1", "x2"})));

    auto f = radical_heuristic(ideal(r, {"(x1^2 + x2^2)*(x1 - 1)"}));
    CHECK(f.certified);
    CHECK(ideal_equal(f.ideal, intersect(ideal(r, {"x1 - 1"}), ideal(r, {"x1", "x2"}))));

    // Only an isolated real zero, not detectable from the monomial structure.
    auto f2 = radical_heuristic(ideal(r, {"x1^2 + (x2 - x1)^2"}));
    CHECK_FALSE(f2.certified);
    CHECK(contains(f2.ideal, poly("x1^2 + (x2 - x1)^2", r)));

    auto coil = coil_registry();
    auto g = radical_heuristic(ideal(coil, {"x1^2*(x1+T*x2)"}));
    CHECK(g.certified);
    CHECK(ideal_equal(g.ideal, ideal(coil, {"x1*(x1+T*x2)"})));

    auto h = radical_heuristic(ideal(r, {"x1^2 - 2", "x2"}));
    CHECK(h.certified);
    CHECK(ideal_equal(h.ideal, ideal(r, {"x1^2 - 2", "x2"})));
}

TEST_CASE("solve_zero_dim examples") {
    auto r = plain2();
    auto s1 = solve_zero_dim(ideal(r, {"x1", "x2"}));
    REQUIRE(s1.status == SolveResult::Status::points);
    REQUIRE(s1.points.size() == 1);
    CHECK(s1.points[0][0].exact);
    CHECK(s1.points[0][0].value == 0);
    CHECK(s1.points[0][1].value == 0);

    auto s2 = solve_zero_dim(ideal(r, {"x1^2 - 1", "x2"}));
    REQUIRE(s2.points.size() == 2);
    CHECK(s2.points[0][0].value == -1);
    CHECK(s2.points[1][0].value == 1);
    CHECK(s2.points[1][1].value == 0);

    CHECK(solve_zero_dim(ideal(r, {"x2*(x1+x2)"})).status == SolveResult::Status::not_zero_dimensional);

    auto s4 = solve_zero_dim(ideal(r, {"x1^2 - 2", "x2 - x1"}));
    REQUIRE(s4.points.size() == 2);
    CHECK_FALSE(s4.points[0][0].exact);
    CHECK(s4.points[1][1].approx() == doctest::Approx(1.41421356237));

    CHECK(solve_zero_dim(ideal(r, {"x1^2 + 1", "x2"})).points.empty());

    auto coil = coil_registry();
    CHECK(solve_zero_dim(ideal(coil, {"x1 - T", "x2"})).status == SolveResult::Status::refused);
    auto s5 = solve_zero_dim(ideal(coil, {"T*x1", "a*x2"}));
    REQUIRE(s5.points.size() == 1);

    auto r3 = plain3();
    auto s6 = solve_zero_dim(ideal(r3, {"x1*(x1-1)", "x2*(x2+1)", "x3 - x1*x2"}));
    REQUIRE(s6.points.size() == 4);
    for (const auto& pt : s6.points) {
        Assignment a;
        for (std::size_t i = 0; i < 3; ++i) a[r3->state_var(i)] = pt[i].value;
        CHECK(all_vanish(polys(r3, {"x1*(x1-1)", "x2*(x2+1)", "x3 - x1*x2"}), a));
    }
}

TEST_CASE("resource budget aborts") {
    auto r = plain3();
    GbOptions opts = GbOptions::defaults();
    opts.max_degree = 3;
    Ideal i = ideal(r, {"x1^3 - x2*x3 + 1", "x2^3 - x1*x3^2", "x3^4 - x1*x2 - 2"});
    CHECK_THROWS_AS(groebner_basis(i, MonomialOrder::lex(3), opts), ResourceError);
}

TEST_CASE("property: reduced basis independent of generator order and selector") {
    auto r = plain3();
    RandomPoly gen(7);
    std::vector<std::size_t> vars{r->state_var(0), r->state_var(1), r->state_var(2)};
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<Polynomial> gens;
        for (int k = 0; k < 3; ++k) gens.push_back(gen.polynomial(r, vars, 3, 2));
        std::vector<Polynomial> perm = gens;
        std::shuffle(perm.begin(), perm.end(), gen.rng());
        auto order = trial % 2 ? MonomialOrder::lex(3) : MonomialOrder::degrevlex(3);
        Ideal a(r, gens), b(r, perm);
        CHECK(a.basis(order) == b.basis(order));
        GbOptions normal = GbOptions::defaults();
        normal.selector = std::make_shared<NormalSelector>();
        CHECK(groebner_basis(a, order, normal) == a.basis(order));
    }
}

TEST_CASE("property: membership agrees with cofactor construction") {
    auto reg = coil_registry();
    RandomPoly gen(8);
    std::vector<std::size_t> vars{reg->state_var(0), reg->state_var(1)};
    std::vector<std::size_t> pvars{reg->state_var(0), reg->state_var(1), reg->param_var(0)};
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<Polynomial> gens;
        for (int k = 0; k < 2; ++k) gens.push_back(gen.polynomial(reg, pvars, 3, 2));
        Ideal i(reg, gens);
        Polynomial member(reg);
        for (const auto& g : gens) member += g * gen.polynomial(reg, pvars, 3, 2);
        CHECK(contains(i, member));
        if (!i.is_unit()) {
            Polynomial outside = member + Polynomial::constant(reg, 1);
            CHECK_FALSE(contains(i, outside));
        }
    }
}

TEST_CASE("property: ideal_equal is an equivalence relation") {
    auto r = plain2();
    RandomPoly gen(9);
    std::vector<std::size_t> vars{r->state_var(0), r->state_var(1)};
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Polynomial> g{gen.polynomial(r, vars, 3, 2), gen.polynomial(r, vars, 3, 2)};
        Ideal a(r, g);
        // b: same ideal, different generators; c: b or a different ideal.
        Ideal b(r, {g[0] + g[1] * gen.polynomial(r, vars, 2, 1), g[1]});
        Ideal c = trial % 2 ? Ideal(r, {g[1], g[0] - g[1]}) : Ideal(r, {g[0]});
        CHECK(ideal_equal(a, a));
        CHECK(ideal_equal(a, b) == ideal_equal(b, a));
        if (ideal_equal(a, b) && ideal_equal(b, c)) CHECK(ideal_equal(a, c));
        CHECK(ideal_equal(a, b));
    }
}

TEST_CASE("property: certified radical results preserve the real zero set") {
    auto r = plain2();
    std::vector<std::vector<Polynomial>> cases{
        polys(r, {"x2^2*(x1+x2)^2"}), polys(r, {"x1^2", "x2"}), polys(r, {"x1^2 + x2^2"}),
        polys(r, {"x1^3*(x1 - x2)", "x1^2*x2^2"}), polys(r, {"(x1^2-1)^2", "x2^3"})};
    RandomPoly gen(10);
    for (const auto& gens : cases) {
        Ideal i(r, gens);
        auto res = radical_heuristic(i);
        REQUIRE(res.certified);
        for (const auto& g : gens) CHECK(contains(res.ideal, g));
        const auto& jg = res.ideal.generators();
        int mismatches = 0;
        for (int k = 0; k < 1000; ++k) {
            Assignment p;
            // Small integer grid so that zeros are actually hit.
            std::uniform_int_distribution<int> d(-2, 2);
            p[r->state_var(0)] = d(gen.rng());
            p[r->state_var(1)] = d(gen.rng());
            if (all_vanish(gens, p) != all_vanish(jg, p)) ++mismatches;
        }
        CHECK(mismatches == 0);
    }
}

TEST_CASE("property: solutions zero the generators") {
    auto r = plain2();
    auto gens = polys(r, {"x1^2 - 3*x1 + 2", "x2^2 - x1"});
    auto sol = solve_zero_dim(Ideal(r, gens));
    REQUIRE(sol.status == SolveResult::Status::points);
    CHECK(sol.points.size() == 4);
    for (const auto& pt : sol.points) {
        CHECK(pt[0].exact);
        double x1 = pt[0].approx(), x2 = pt[1].approx();
        CHECK(std::abs(x1 * x1 - 3 * x1 + 2) < 1e-12);
        CHECK(std::abs(x2 * x2 - x1) < 1e-12);
    }
}
