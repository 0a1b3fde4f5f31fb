#include <doctest.h>

#include "helpers.hpp"
#include "raccess/analysis.hpp"

#include <set>

using namespace testing_support;

namespace {

Ideal state_ideal(const SystemModel& sys, const std::vector<std::string>& gens) {
    std::vector<Polynomial> ps;
    for (const auto& g : gens) ps.push_back(poly(g, sys.state_registry()));
    return Ideal(sys.state_registry(), ps);
}

bool single_origin(const SingularSet& s) {
    if (s.kind != SingularSet::Kind::points || s.points.size() != 1) return false;
    for (const auto& c : s.points[0])
        if (!c.exact || c.value != 0) return false;
    return true;
}

std::vector<Rational> random_state(RandomPoly& gen, std::size_t n) {
    std::vector<Rational> x;
    for (std::size_t i = 0; i < n; ++i) x.push_back(gen.coeff(9));
    return x;
}

} // namespace

TEST_CASE("generic accessibility examples") {
    CHECK(generic_accessibility(coil_system()));
    CHECK_FALSE(generic_accessibility(drift_system()));
    CHECK(generic_accessibility(lag_system()));
    CHECK(generic_accessibility(eq16_system()));
}

TEST_CASE("the kappa chain on the coil") {
    SystemModel coil = coil_system();
    ChainResult r = kappa_chain(coil, 0, true);
    REQUIRE(r.status == ChainResult::Status::stabilized);
    CHECK(r.index == 3);
    CHECK(r.confirmed);
    REQUIRE(r.history.size() == 4);
    CHECK(r.history[0].k == 2);
    CHECK(ideal_equal(r.history[0].ideal, state_ideal(coil, {"x1*(x1 + T*x2)"})));
    // The plain sum is the square of the maximal ideal; only its radical is <x1, x2>.
    const Ideal m2 = state_ideal(coil, {"x1^2", "x1*x2", "x2^2"});
    CHECK(ideal_equal(r.history[1].ideal, m2));
    CHECK(ideal_equal(r.history[2].ideal, m2));
    CHECK(ideal_equal(r.history[3].ideal, m2));
    CHECK(ideal_equal(r.ideal, m2));
    CHECK(ideal_equal(radical_heuristic(r.ideal).ideal, state_ideal(coil, {"x1", "x2"})));
    CHECK(single_origin(describe_zero_set(r.ideal)));

    ChainResult quick = kappa_chain(coil, 0);
    CHECK(quick.index == 3);
    CHECK_FALSE(quick.confirmed);
    CHECK(quick.history.size() == 3);
    for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(contains(r.history[i].ideal, r.history[i - 1].ideal));
}

TEST_CASE("the kappa chain on the backward coil") {
    SystemModel back = backward_coil_system();
    ChainResult r = kappa_chain(back, 0);
    REQUIRE(r.status == ChainResult::Status::stabilized);
    CHECK(r.index == 3);
    CHECK(ideal_equal(r.history[0].ideal,
                      state_ideal(back, {"z1*(z1 - T*(b*z1 + z2))", "z2*(z1 - T*(b*z1 + z2))"})));
    CHECK(ideal_equal(r.ideal, state_ideal(back, {"z1^2", "z1*z2", "z2^2"})));
    CHECK(ideal_equal(radical_heuristic(r.ideal).ideal, state_ideal(back, {"z1", "z2"})));
    CHECK(single_origin(describe_zero_set(r.ideal)));

    AnalysisReport rep = backward_analysis(back);
    CHECK(rep.backward);
    CHECK(single_origin(rep.singular_set));
}

TEST_CASE("the kappa chain on the rational system") {
    SystemModel ratio = eq16_system();
    ChainResult r = kappa_chain(ratio, 0);
    REQUIRE(r.status == ChainResult::Status::stabilized);
    CHECK(*r.index <= 3);
    CHECK(single_origin(describe_zero_set(r.ideal)));
}

TEST_CASE("the r* chain") {
    SystemModel ratio = eq16_system();
    ChainResult r = rstar_chain(ratio, 0);
    REQUIRE(r.status == ChainResult::Status::stabilized);
    CHECK(r.index == 3);
    CHECK(r.certified);
    REQUIRE(r.history.size() == 3);
    CHECK(ideal_equal(r.history[0].ideal, state_ideal(ratio, {"x2*(x1 + x2)"})));
    CHECK(ideal_equal(r.history[1].ideal, state_ideal(ratio, {"x1", "x2"})));
    CHECK(ideal_equal(r.history[2].ideal, state_ideal(ratio, {"x1", "x2"})));

    ChainResult c = rstar_chain(coil_system(), 0);
    REQUIRE(c.status == ChainResult::Status::stabilized);
    CHECK(c.index == 3);

    // r* <= kappa whenever the radical chain is certified.
    for (const auto& sys : {coil_system(), eq16_system(), backward_coil_system()}) {
        ChainResult k = kappa_chain(sys, 0);
        ChainResult rs = rstar_chain(sys, 0);
        REQUIRE(k.index.has_value());
        if (rs.certified && rs.index) CHECK(*rs.index <= *k.index);
    }
}

TEST_CASE("chain budget exhaustion keeps the history") {
    ChainResult r = kappa_chain(coil_system(), 2);
    CHECK(r.status == ChainResult::Status::budget_exhausted);
    CHECK_FALSE(r.index.has_value());
    CHECK(r.history.size() == 1);
    AnalysisOptions opt;
    opt.max_k = 3;
    AnalysisReport rep = analyze(coil_system(), opt);
    CHECK(rep.kappa.status == ChainResult::Status::budget_exhausted);
    CHECK(rep.certification == Certification::heuristic);
    CHECK_FALSE(rep.singular_set.note.empty());
}

TEST_CASE("point status examples") {
    Analyzer lag(lag_system());
    PointVerdict v4 = lag.point_status({0, 1}, 4);
    CHECK(v4.in_S_k);
    CHECK_FALSE(v4.undefined);
    CHECK_FALSE(lag.point_status({0, 1}, 5).in_S_k);

    Analyzer coil(coil_system());
    for (int k = 1; k <= 5; ++k) CHECK(coil.point_status({0, 0}, k).in_S_k);
    CHECK(coil.point_status({0, 1}, 2).in_S_k);
    CHECK_FALSE(coil.point_status({0, 1}, 3).in_S_k);
    CHECK_FALSE(coil.point_status({1, 1}, 2).in_S_k);

    SystemModel polar = make_system("polar", {}, {"x1", "x2"}, {"u"}, {"u/x1", "x2 + u*x1"});
    PointVerdict p = point_status(polar, {0, 2}, 2);
    CHECK(p.undefined);
}

TEST_CASE("invariance check") {
    SystemModel coil = coil_system();
    CHECK(invariance_check(state_ideal(coil, {"x1", "x2"}), coil));
    CHECK_FALSE(invariance_check(state_ideal(coil, {"x1"}), coil));
    for (const auto& sys : {coil_system(), eq16_system(), backward_coil_system()}) {
        ChainResult r = kappa_chain(sys, 0);
        REQUIRE(r.status == ChainResult::Status::stabilized);
        CHECK(invariance_check(r.ideal, sys));
    }
}

TEST_CASE("backward analysis wrapper") {
    SystemModel self = make_system("selfinverse", {}, {"x"}, {"v"}, {"x + v"});
    AnalysisReport rep = backward_analysis(self);
    CHECK(rep.backward);
    CHECK(rep.generically_accessible);
    CHECK(rep.singular_set.kind == SingularSet::Kind::empty);
    CHECK(rep.kappa.index == 1);

    AnalysisReport flat = backward_analysis(drift_system());
    CHECK_FALSE(flat.generically_accessible);
    CHECK(flat.singular_set.kind == SingularSet::Kind::entire_space);
    CHECK(flat.kappa.status == ChainResult::Status::not_applicable);
}

TEST_CASE("non-submersive systems short-circuit") {
    SystemModel flat = make_system("flat", {}, {"x1", "x2"}, {"u"}, {"x1", "x1"});
    AnalysisReport rep = analyze(flat);
    CHECK_FALSE(rep.submersive);
    CHECK(rep.singular_set.kind == SingularSet::Kind::entire_space);
    CHECK(rep.kappa.history.empty());
}

TEST_CASE("full reports on the corpus") {
    AnalysisOptions opt;
    opt.exact_radical = true;
    AnalysisReport coil = analyze(coil_system(), opt);
    CHECK(coil.kappa.index == 3);
    REQUIRE(coil.r_star.has_value());
    CHECK(coil.r_star->index == 3);
    CHECK(single_origin(coil.singular_set));
    CHECK(coil.invariant == true);
    CHECK(coil.certification == Certification::exact);

    // lag is not stable by k = 4; S_4 consists of three points.
    opt.exact_radical = false;
    opt.max_k = 4;
    AnalysisReport lag = analyze(lag_system(), opt);
    CHECK(lag.kappa.status == ChainResult::Status::budget_exhausted);
    CHECK(lag.certification == Certification::heuristic);
    REQUIRE(lag.singular_set.kind == SingularSet::Kind::points);
    std::set<std::pair<Rational, Rational>> pts;
    for (const auto& p : lag.singular_set.points) {
        REQUIRE(p.size() == 2);
        CHECK(p[0].exact);
        CHECK(p[1].exact);
        pts.insert({p[0].value, p[1].value});
    }
    CHECK(pts == std::set<std::pair<Rational, Rational>>{{-1, 0}, {0, 0}, {0, 1}});
}

TEST_CASE("property: S_k descends in k") {
    RandomPoly gen(99);
    for (const auto& sys : {coil_system(), lag_system(), eq16_system()}) {
        Analyzer an(sys);
        // lag becomes accessible from (0,1) only at k = 5.
        const int top = sys.name() == "lag" ? 5 : *an.kappa_chain(0).index + 1;
        for (int trial = 0; trial < 200; ++trial) {
            // Mix in points on coordinate axes so that some lie in S_k.
            std::vector<Rational> x = random_state(gen, sys.n());
            if (trial % 4 == 0) x[0] = 0;
            if (trial % 8 == 0) x[1] = 0;
            bool prev = true;
            for (int k = 1; k <= top; ++k) {
                PointVerdict v = an.point_status(x, k);
                if (v.undefined) break;
                if (!prev) CHECK_FALSE(v.in_S_k);
                prev = v.in_S_k;
            }
        }
    }
}

TEST_CASE("property: sampled genericity") {
    RandomPoly gen(7);
    for (const auto& sys : {coil_system(), eq16_system(), backward_coil_system()}) {
        Analyzer an(sys);
        ChainResult r = an.kappa_chain(0);
        REQUIRE(r.index.has_value());
        int accessible = 0;
        for (int trial = 0; trial < 500; ++trial) {
            PointVerdict v = an.point_status(random_state(gen, sys.n()), *r.index);
            if (!v.undefined && !v.in_S_k) ++accessible;
        }
        CHECK(accessible >= 495);
    }
}

TEST_CASE("factored rendering") {
    SystemModel coil = coil_system();
    auto r0 = coil.state_registry();
    CHECK(factored_string(poly("x1^2 + T*x1*x2", r0)) == "x1*(x1 + T*x2)");
    CHECK(factored_string(poly("x1", r0)) == "x1");
    CHECK(factored_string(poly("T*x1*x2", r0)) == "T*x1*x2");
    CHECK(factored_string(poly("-2*x1 - 2*x2", r0)) == "-2*(x1 + x2)");
    CHECK(factored_string(poly("(a + b)*(x1 + x2)", r0)) == "(a + b)*(x1 + x2)");
    CHECK(factored_string(poly("7", r0)) == "7");
}
