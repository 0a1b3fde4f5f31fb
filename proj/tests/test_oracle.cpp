#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "raccess/errors.hpp"
#include "raccess/oracle.hpp"

using namespace testing_support;

namespace {

const std::map<std::string, double> kCoilParams{{"T", 0.1}, {"a", 2.0}, {"b", 0.5}};

std::vector<std::vector<double>> random_sequence(std::mt19937_64& rng, int k, std::size_t m) {
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    std::vector<std::vector<double>> u(static_cast<std::size_t>(k), std::vector<double>(m));
    for (auto& row : u)
        for (auto& c : row) c = box(rng);
    return u;
}

bool all_close(const std::vector<double>& got, const std::vector<double>& want) {
    if (got.size() != want.size()) return false;
    for (std::size_t i = 0; i < got.size(); ++i)
        if (got[i] != want[i]) return false;
    return true;
}

} // namespace

TEST_CASE("simulation of lag from (0,1)") {
    NumericMap lag = NumericMap::from_system(lag_system());
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        Trajectory tr = simulate(lag, {0, 1}, random_sequence(rng, 3, 1));
        REQUIRE(tr.x.size() == 4);
        CHECK(all_close(tr.x[1], {1, 1}));
        CHECK(all_close(tr.x[2], {1, 0}));
        CHECK(all_close(tr.x[3], {0, -1}));
    }
}

TEST_CASE("simulation basics") {
    NumericMap coil = NumericMap::from_system(coil_system(), kCoilParams);
    Trajectory rest = simulate(coil, {0, 0}, std::vector<std::vector<double>>(5, {0.0}));
    for (const auto& x : rest.x) CHECK(all_close(x, {0, 0}));

    std::mt19937_64 rng(3);
    auto u = random_sequence(rng, 6, 1);
    Trajectory a = simulate(coil, {0.3, -0.2}, u), b = simulate(coil, {0.3, -0.2}, u);
    for (std::size_t t = 0; t < a.x.size(); ++t) CHECK(all_close(a.x[t], b.x[t]));
    CHECK(a.inputs == u);

    CHECK_THROWS_AS(NumericMap::from_system(coil_system()), std::invalid_argument);
    CHECK_THROWS_AS(simulate(coil, {0}, u), std::invalid_argument);
}

TEST_CASE("pole guard reports the step") {
    NumericMap ratio = NumericMap::from_system(eq16_system());
    try {
        simulate(ratio, {0, 1}, {{0.0}});
        FAIL("expected a pole");
    } catch (const PoleError& e) {
        CHECK(e.step() == 0);
    }
    // x(1) = (1, 2); u(1) = -1 makes u + x1 vanish at the second step.
    try {
        simulate(ratio, {1, 1}, {{0.0}, {-1.0}});
        FAIL("expected a pole");
    } catch (const PoleError& e) {
        CHECK(e.step() == 1);
    }
    CHECK_THROWS_AS(numeric_access_matrix(ratio, {0, 1}, {{0.0}}), PoleError);
}

TEST_CASE("numeric access matrix agrees with the exact one") {
    // Evaluate the symbolic M_k at a rational point and compare with the
    // forward-mode matrix of the same point.
    SystemModel sys = eq16_system();
    NumericMap map = NumericMap::from_system(sys);
    AccessMatrix M = build_M(sys, 3);
    const auto& reg = M.entries.at(0, 0).registry();
    const std::vector<Rational> x0{Rational(1, 3), Rational(2, 5)};
    const std::vector<Rational> u{Rational(1, 2), Rational(-3, 4), Rational(5, 7)};
    Assignment pt;
    for (std::size_t i = 0; i < 2; ++i) pt[reg->state_var(i)] = x0[i];
    for (int t = 0; t < 3; ++t) pt[reg->input_var(0, t)] = u[static_cast<std::size_t>(t)];
    Eigen::MatrixXd num = numeric_access_matrix(map, {x0[0].get_d(), x0[1].get_d()},
                                                {{u[0].get_d()}, {u[1].get_d()}, {u[2].get_d()}});
    REQUIRE(num.rows() == 2);
    REQUIRE(num.cols() == 3);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(num(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) ==
                  doctest::Approx(evaluate(M.entries.at(r, c), pt).get_d()).epsilon(1e-12));
}

TEST_CASE("property: forward-mode matrix matches finite differences") {
    RandomPoly gen(77);
    std::uniform_int_distribution<std::size_t> dim(1, 3);
    std::uniform_int_distribution<int> horizon(1, 4);
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = dim(gen.rng()), m = dim(gen.rng());
        const int k = horizon(gen.rng());
        NumericMap map = NumericMap::from_system(random_system(gen, n, m));
        std::vector<double> x(n);
        for (auto& v : x) v = box(gen.rng());
        auto u = random_sequence(gen.rng(), k, m);
        Eigen::MatrixXd ad = numeric_access_matrix(map, x, u);
        Eigen::MatrixXd fd = finite_difference_access_matrix(map, x, u);
        const double scale = std::max(1.0, ad.cwiseAbs().maxCoeff());
        CHECK((ad - fd).cwiseAbs().maxCoeff() / scale < 1e-5);
    }
}

TEST_CASE("jacobian rank examples") {
    NumericMap lag = NumericMap::from_system(lag_system());
    RankEstimate r4 = jacobian_rank(lag, {0, 1}, 4);
    CHECK(r4.rank == 1);
    CHECK(r4.samples == 1 + 4 + 64);
    RankEstimate r5 = jacobian_rank(lag, {0, 1}, 5);
    CHECK(r5.rank == 2);
    CHECK(r5.singular_values.size() == 2);
    CHECK(r5.singular_values[1] > r5.tolerance);
    CHECK(r5.best_inputs.size() == 5);

    NumericMap coil = NumericMap::from_system(coil_system(), kCoilParams);
    for (int k = 1; k <= 6; ++k) CHECK(jacobian_rank(coil, {0, 0}, k).rank <= 1);
    CHECK(jacobian_rank(coil, {0.5, 0.25}, 2).rank == 2);

    RegistryPtr reg = VariableRegistry::create({}, {"x"}, {"u"}, 1);
    NumericMap shift = NumericMap::from_expressions(reg, {parse_expression("x + u", *reg, false)});
    for (int k = 1; k <= 3; ++k) CHECK(jacobian_rank(shift, {0.7}, k).rank == 1);

    CHECK_THROWS_AS(jacobian_rank(lag, {0, 1}, 0), std::invalid_argument);
    RankOptions none;
    none.samples = 0;
    CHECK_THROWS_AS(jacobian_rank(lag, {0, 1}, 2, none), std::invalid_argument);
}

TEST_CASE("every sample at a pole is an error") {
    RegistryPtr reg = VariableRegistry::create({}, {"x"}, {"u"}, 1);
    NumericMap polar = NumericMap::from_expressions(reg, {parse_expression("u/x", *reg, false)});
    CHECK_THROWS_AS(jacobian_rank(polar, {0.0}, 2), PoleError);
    CHECK(jacobian_rank(polar, {1.0}, 1).rank == 1);
}

TEST_CASE("property: numeric rank is monotone in k at generic points") {
    RandomPoly gen(5);
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    for (const auto& sys : {lag_system(), eq16_system()}) {
        NumericMap map = NumericMap::from_system(sys);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> x{box(gen.rng()), box(gen.rng())};
            std::size_t prev = 0;
            for (int k = 1; k <= 4; ++k) {
                std::size_t r = jacobian_rank(map, x, k).rank;
                CHECK(r >= prev);
                prev = r;
            }
        }
    }
}

TEST_CASE("grid scan of the analytic map") {
    // sin(pi x) vanishes at the integers: x = 1 is quiet only for one step
    // (it maps to 1/2), x = 2 for two steps (2 -> 1 -> 1/2), x = 0 forever.
    ScanOptions opt;
    opt.lo = 0;
    opt.hi = 2;
    opt.step = 0.01;
    opt.k = 3;
    opt.samples = 64;
    opt.threshold = 1e-6;
    ScanResult res = grid_scan_1d(analytic_map(), opt);
    CHECK(res.grid.size() == 201);
    CHECK(res.grid.back() == 2.0);
    REQUIRE(res.flagged.size() == 3);
    CHECK(res.flagged[0] == std::vector<double>{0.0, 1.0, 2.0});
    CHECK(res.flagged[1] == std::vector<double>{0.0, 2.0});
    CHECK(res.flagged[2] == std::vector<double>{0.0});

    RegistryPtr reg = VariableRegistry::create({}, {"x"}, {"u"}, 1);
    NumericMap shift = NumericMap::from_expressions(reg, {parse_expression("x + u", *reg, false)});
    ScanResult lin = grid_scan_1d(shift, opt);
    for (const auto& f : lin.flagged) CHECK(f.empty());

    opt.k = 0;
    CHECK_THROWS_AS(grid_scan_1d(shift, opt), std::invalid_argument);
    CHECK_THROWS_AS(grid_scan_1d(NumericMap::from_system(eq16_system()), ScanOptions{}), std::invalid_argument);
}
