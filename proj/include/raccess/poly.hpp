#pragma once

// Exact sparse multivariate polynomials and rational functions over Q.
//
// Every polynomial lives over a VariableRegistry that fixes the variable set
// and its order. Terms are stored in descending graded-reverse-lexicographic
// order over the registry order, with no zero coefficients.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace raccess {

using Rational = mpq_class;
using Integer = mpz_class;

enum class VarClass { parameter, state, input };

struct Symbol {
    std::string name;  // display name: "x1", "T", "u(2)"
    VarClass kind = VarClass::state;
    std::string base;  // inputs: the declared name ("u"); otherwise == name
    int time = 0;      // inputs only
    int slot = 0;      // position within its class (input slot for inputs)
};

class VariableRegistry;
using RegistryPtr = std::shared_ptr<const VariableRegistry>;

/// Ordered variable set: parameters, then states, then inputs grouped by time.
class VariableRegistry {
public:
    static RegistryPtr create(std::vector<std::string> params, std::vector<std::string> states,
                              std::vector<std::string> inputs, int horizon);

    std::size_t size() const noexcept { return symbols_.size(); }
    const Symbol& symbol(std::size_t i) const { return symbols_.at(i); }
    const std::vector<Symbol>& symbols() const noexcept { return symbols_; }

    std::size_t num_params() const noexcept { return params_.size(); }
    std::size_t n() const noexcept { return states_.size(); }
    std::size_t m() const noexcept { return inputs_.size(); }
    int horizon() const noexcept { return horizon_; }

    const std::vector<std::string>& param_names() const noexcept { return params_; }
    const std::vector<std::string>& state_names() const noexcept { return states_; }
    const std::vector<std::string>& input_names() const noexcept { return inputs_; }

    std::size_t param_var(std::size_t i) const;
    std::size_t state_var(std::size_t i) const;
    std::size_t input_var(std::size_t slot, int time) const;

    std::optional<std::size_t> find(const std::string& name) const;
    std::vector<std::size_t> indices_of(VarClass kind) const;

    /// Same symbols in the same order (registries may still be distinct objects).
    bool same_as(const VariableRegistry& other) const;

    /// Registry with the same declarations and inputs for times 0..horizon-1.
    RegistryPtr with_horizon(int horizon) const;

private:
    VariableRegistry() = default;

    std::vector<Symbol> symbols_;
    std::vector<std::string> params_, states_, inputs_;
    int horizon_ = 0;
};

bool same_ring(const RegistryPtr& a, const RegistryPtr& b);

struct Monomial {
    std::vector<std::uint16_t> exp;
    std::uint32_t degree = 0;

    Monomial() = default;
    explicit Monomial(std::size_t arity) : exp(arity, 0) {}

    std::size_t arity() const noexcept { return exp.size(); }
    bool is_one() const noexcept { return degree == 0; }
    bool divides(const Monomial& other) const;

    Monomial operator*(const Monomial& other) const;
    /// *this / divisor; requires divisor.divides(*this).
    Monomial quotient(const Monomial& divisor) const;
    static Monomial lcm(const Monomial& a, const Monomial& b);
    static Monomial gcd(const Monomial& a, const Monomial& b);

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.exp == b.exp; }
};

/// Graded reverse lexicographic: +1 if a > b, -1 if a < b, 0 if equal.
int grevlex_compare(const Monomial& a, const Monomial& b);

struct GrevlexLess {
    bool operator()(const Monomial& a, const Monomial& b) const { return grevlex_compare(a, b) < 0; }
};

struct MonomialHash {
    std::size_t operator()(const Monomial& m) const noexcept;
};

struct Term {
    Monomial mono;
    Rational coeff;
};

/// Variable index -> exact value.
using Assignment = std::map<std::size_t, Rational>;

class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(RegistryPtr reg) : reg_(std::move(reg)) {}

    static Polynomial constant(RegistryPtr reg, const Rational& c);
    static Polynomial variable(RegistryPtr reg, std::size_t var, unsigned power = 1);
    static Polynomial monomial(RegistryPtr reg, Monomial mono, const Rational& c);
    /// Sorts and merges like terms; drops zeros.
    static Polynomial from_terms(RegistryPtr reg, std::vector<Term> terms);

    const RegistryPtr& registry() const noexcept { return reg_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }

    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_constant() const noexcept;
    bool is_one() const;
    /// Constant term (0 when absent).
    Rational constant_term() const;
    const Term& leading_term() const;

    std::uint32_t total_degree() const;
    int degree_in(std::size_t var) const;
    bool uses(std::size_t var) const;
    bool uses_class(VarClass kind) const;
    std::vector<std::size_t> variables() const;

    Polynomial operator-() const;
    Polynomial& operator+=(const Polynomial& other);
    Polynomial& operator-=(const Polynomial& other);
    Polynomial& operator*=(const Polynomial& other);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    Polynomial scaled(const Rational& c) const;
    Polynomial times_monomial(const Monomial& mono, const Rational& c) const;
    Polynomial pow(unsigned e) const;

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_equal(b); }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !a.terms_equal(b); }

    Polynomial derivative(std::size_t var) const;
    Rational evaluate(const Assignment& point) const;
    /// Substitutes the assigned variables; the others stay symbolic.
    Polynomial partial_evaluate(const Assignment& point) const;
    double evaluate_double(const std::vector<double>& values) const;

    /// Positive rational c such that this/c has coprime integer coefficients.
    Rational content() const;
    /// Integer-primitive with positive leading coefficient; zero stays zero.
    Polynomial primitive() const;
    Polynomial monic() const;

    /// Same terms over a registry sharing this one's variable prefix; variables
    /// beyond the target's arity must be unused.
    Polynomial embed(RegistryPtr target) const;

    /// Coefficients w.r.t. one variable: result[d] is the coefficient of var^d.
    std::vector<Polynomial> coefficients_in(std::size_t var) const;

    std::string to_string() const;
    std::string to_string(const std::function<std::string(std::size_t)>& name) const;

private:
    bool terms_equal(const Polynomial& other) const;
    void require_same_ring(const Polynomial& other) const;

    RegistryPtr reg_;
    std::vector<Term> terms_;
};

/// Exact gcd over Q[all registry variables]; normalized primitive, positive leading coefficient.
Polynomial gcd(const Polynomial& a, const Polynomial& b);
/// a / b when b divides a exactly; std::nullopt otherwise.
std::optional<Polynomial> exact_divide(const Polynomial& a, const Polynomial& b);

class RationalFunction {
public:
    RationalFunction() = default;
    explicit RationalFunction(Polynomial num);
    /// Normalizes: gcd removed, denominator primitive with positive leading coefficient.
    RationalFunction(Polynomial num, Polynomial den);

    static RationalFunction constant(RegistryPtr reg, const Rational& c);
    static RationalFunction variable(RegistryPtr reg, std::size_t var);

    const Polynomial& num() const noexcept { return num_; }
    const Polynomial& den() const noexcept { return den_; }
    const RegistryPtr& registry() const noexcept { return num_.registry(); }

    bool is_zero() const noexcept { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_one(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    bool uses(std::size_t var) const { return num_.uses(var) || den_.uses(var); }
    bool uses_class(VarClass kind) const { return num_.uses_class(kind) || den_.uses_class(kind); }

    RationalFunction operator-() const;
    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);
    RationalFunction pow(int e) const;

    friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const RationalFunction& a, const RationalFunction& b) { return !(a == b); }

    RationalFunction embed(RegistryPtr target) const;
    std::string to_string() const;
    std::string to_string(const std::function<std::string(std::size_t)>& name) const;

    /// Skips the gcd; the caller guarantees num and den are coprime.
    static RationalFunction from_reduced(Polynomial num, Polynomial den);

private:
    Polynomial num_;
    Polynomial den_;
};

/// Variable index -> replacement, applied simultaneously.
using Bindings = std::map<std::size_t, RationalFunction>;

RationalFunction differentiate(const RationalFunction& f, std::size_t var);
RationalFunction substitute(const RationalFunction& f, const Bindings& bindings);

/// Throws EvaluationError (pole or 0/0) when the denominator vanishes.
Rational evaluate(const RationalFunction& f, const Assignment& point);

/// Splits p by the monomials it has in the variables of one class.
/// Keys are monomials over the full registry (zero outside the class).
std::map<Monomial, Polynomial, GrevlexLess> collect_by_class(const Polynomial& p, VarClass kind);

/// Product of the distinct irreducible factors of p (up to a rational unit).
Polynomial square_free_part(const Polynomial& p);

} // namespace raccess
