#pragma once

#include <random>
#include <string>
#include <vector>

#include "raccess/expr.hpp"
#include "raccess/oracle.hpp"
#include "raccess/poly.hpp"
#include "raccess/system.hpp"

namespace testing_support {

using namespace raccess;

inline RegistryPtr coil_registry(int horizon = 1) {
    return VariableRegistry::create({"T", "a", "b"}, {"x1", "x2"}, {"u"}, horizon);
}

inline RationalFunction rf(const std::string& text, const RegistryPtr& reg) { return parse_rational(text, reg); }

inline Polynomial poly(const std::string& text, const RegistryPtr& reg) {
    RationalFunction f = parse_rational(text, reg);
    if (!f.is_polynomial()) throw std::invalid_argument("not a polynomial: " + text);
    return f.num();
}

class RandomPoly {
public:
    explicit RandomPoly(unsigned seed) : rng_(seed) {}

    std::mt19937_64& rng() { return rng_; }

    Rational coeff(int range = 5) {
        std::uniform_int_distribution<int> num(-range, range);
        std::uniform_int_distribution<int> den(1, 3);
        Rational c(num(rng_), den(rng_));
        c.canonicalize();
        return c;
    }

    Rational nonzero_coeff(int range = 5) {
        Rational c;
        do c = coeff(range);
        while (c == 0);
        return c;
    }

    Polynomial polynomial(const RegistryPtr& reg, const std::vector<std::size_t>& vars, int max_terms,
                          int max_degree) {
        std::uniform_int_distribution<int> nterms(1, max_terms);
        std::uniform_int_distribution<int> deg(0, max_degree);
        std::uniform_int_distribution<std::size_t> pick(0, vars.size() - 1);
        std::vector<Term> terms;
        int count = nterms(rng_);
        for (int i = 0; i < count; ++i) {
            Monomial mono(reg->size());
            int d = deg(rng_);
            for (int j = 0; j < d; ++j) {
                std::size_t v = vars[pick(rng_)];
                ++mono.exp[v];
                ++mono.degree;
            }
            terms.push_back({mono, nonzero_coeff()});
        }
        return Polynomial::from_terms(reg, std::move(terms));
    }

    RationalFunction rational(const RegistryPtr& reg, const std::vector<std::size_t>& vars, int max_terms,
                              int max_degree) {
        Polynomial n = polynomial(reg, vars, max_terms, max_degree);
        Polynomial d;
        do d = polynomial(reg, vars, max_terms, max_degree - 1);
        while (d.is_zero());
        return RationalFunction(n, d);
    }

    Assignment point(const RegistryPtr& reg, int range = 7) {
        Assignment a;
        for (std::size_t v = 0; v < reg->size(); ++v) a[v] = coeff(range);
        return a;
    }

private:
    std::mt19937_64 rng_;
};

inline SystemModel make_system(const std::string& name, std::vector<std::string> params, std::vector<std::string> states,
                               std::vector<std::string> inputs, const std::vector<std::string>& updates) {
    RegistryPtr reg = VariableRegistry::create(std::move(params), std::move(states), std::move(inputs), 1);
    std::vector<RationalFunction> phi;
    for (const auto& u : updates) phi.push_back(parse_rational(u, reg));
    return SystemModel(name, reg, std::move(phi));
}

inline SystemModel coil_system() {
    return make_system("coil", {"T", "a", "b"}, {"x1", "x2"}, {"u"}, {"x1 + T*x2", "x2 + T*(a*x1*u - b*x2)"});
}

inline SystemModel lag_system() {
    return make_system("lag", {}, {"x1", "x2"}, {"u"}, {"x2", "-x1 + x2 + u*x2^2 - u*x2"});
}

inline SystemModel eq16_system() { return make_system("ratio", {}, {"x1", "x2"}, {"u"}, {"x2/(u + x1)", "x1 + x2"}); }

inline SystemModel drift_system() { return make_system("drift", {}, {"x1", "x2"}, {"u"}, {"u", "x2 + 1"}); }

inline SystemModel backward_coil_system() {
    return make_system("coil_inverse", {"T", "a", "b"}, {"z1", "z2"}, {"v"},
                       {"((b*z1 + z2)*T - z1)/(v*a*T^2 + b*T - 1)", "(v*z1*a*T - z2)/(v*a*T^2 + b*T - 1)"});
}

/// Random polynomial system with sparse quadratic updates that all depend on some input.
inline SystemModel random_system(RandomPoly& gen, std::size_t n, std::size_t m) {
    std::vector<std::string> states, inputs;
    for (std::size_t i = 0; i < n; ++i) states.push_back("x" + std::to_string(i + 1));
    for (std::size_t j = 0; j < m; ++j) inputs.push_back("u" + std::to_string(j + 1));
    RegistryPtr reg = VariableRegistry::create({}, states, inputs, 1);
    std::vector<std::size_t> vars;
    for (std::size_t i = 0; i < n; ++i) vars.push_back(reg->state_var(i));
    for (std::size_t j = 0; j < m; ++j) vars.push_back(reg->input_var(j, 0));
    std::vector<RationalFunction> phi;
    std::uniform_int_distribution<std::size_t> pick_u(0, m - 1);
    for (std::size_t i = 0; i < n; ++i) {
        Polynomial p = gen.polynomial(reg, vars, 3, 2);
        p += Polynomial::variable(reg, reg->input_var(pick_u(gen.rng()), 0)).scaled(gen.nonzero_coeff());
        phi.emplace_back(p);
    }
    return SystemModel("random", reg, std::move(phi));
}

/// x+ = x/2 + u*sin(pi*x), a one-state map with transcendental terms.
inline NumericMap analytic_map() {
    RegistryPtr reg = VariableRegistry::create({}, {"x"}, {"u"}, 1);
    return NumericMap::from_expressions(reg, {parse_expression("x/2 + u*sin(pi*x)", *reg, true)});
}

/// Double-precision image of phi at (x, u).
inline std::vector<double> step_double(const SystemModel& sys, const std::vector<double>& x,
                                       const std::vector<double>& u, const std::vector<double>& params = {}) {
    std::vector<double> vals(params);
    vals.insert(vals.end(), x.begin(), x.end());
    vals.insert(vals.end(), u.begin(), u.end());
    std::vector<double> out;
    for (const auto& f : sys.phi()) out.push_back(f.num().evaluate_double(vals) / f.den().evaluate_double(vals));
    return out;
}

} // namespace testing_support
