#pragma once

// Expression trees for system update maps. Rational expressions convert to
// exact RationalFunctions; numeric-only expressions (sin, cos, exp, ...) are
// evaluated by the oracle through eval_expr.

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "raccess/poly.hpp"

namespace raccess {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Op { number, variable, pi, neg, add, sub, mul, div, pow, call };

    Op op = Op::number;
    Rational number;    // Op::number
    std::size_t var = 0;  // Op::variable: registry index
    std::string name;   // Op::variable display name, Op::call function name
    int exponent = 0;   // Op::pow
    ExprPtr lhs, rhs;   // unary ops use lhs
    int line = 1;
    int column = 1;
};

/// Known transcendental functions (numeric-only mode).
bool is_function_name(std::string_view name);

/// Parses one expression over `reg`. Inputs are referenced by their declared
/// name (time 0) or as name(t). Errors carry line/column; `line` and
/// `column` give the position of the first character of `text`.
ExprPtr parse_expression(std::string_view text, const VariableRegistry& reg, bool numeric_only, int line = 1,
                         int column = 1);

bool is_transcendental(const Expr& e);

/// Exact conversion; throws ParseError for transcendental nodes or
/// division by an identically zero expression.
RationalFunction to_rational(const Expr& e, const RegistryPtr& reg);

/// Shorthand: parse + to_rational.
RationalFunction parse_rational(std::string_view text, const RegistryPtr& reg);

/// Numeric evaluation over any field-like scalar with sin/cos/exp/log/sqrt/tan
/// found by ADL or in std. `value(var)` supplies variable values; `divide`
/// performs (and guards) division.
template <class S, class ValueFn, class DivideFn>
S eval_expr(const Expr& e, const ValueFn& value, const DivideFn& divide) {
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    using std::tan;
    switch (e.op) {
    case Expr::Op::number: return S(e.number.get_d());
    case Expr::Op::variable: return value(e.var);
    case Expr::Op::pi: return S(M_PI);
    case Expr::Op::neg: return -eval_expr<S>(*e.lhs, value, divide);
    case Expr::Op::add: return eval_expr<S>(*e.lhs, value, divide) + eval_expr<S>(*e.rhs, value, divide);
    case Expr::Op::sub: return eval_expr<S>(*e.lhs, value, divide) - eval_expr<S>(*e.rhs, value, divide);
    case Expr::Op::mul: return eval_expr<S>(*e.lhs, value, divide) * eval_expr<S>(*e.rhs, value, divide);
    case Expr::Op::div: return divide(eval_expr<S>(*e.lhs, value, divide), eval_expr<S>(*e.rhs, value, divide));
    case Expr::Op::pow: {
        S base = eval_expr<S>(*e.lhs, value, divide);
        int k = e.exponent < 0 ? -e.exponent : e.exponent;
        S acc(1.0);
        for (int i = 0; i < k; ++i) acc = acc * base;
        return e.exponent < 0 ? divide(S(1.0), acc) : acc;
    }
    case Expr::Op::call: {
        S a = eval_expr<S>(*e.lhs, value, divide);
        if (e.name == "sin") return sin(a);
        if (e.name == "cos") return cos(a);
        if (e.name == "tan") return tan(a);
        if (e.name == "exp") return exp(a);
        if (e.name == "log") return log(a);
        if (e.name == "sqrt") return sqrt(a);
        throw std::logic_error("eval_expr: unknown function " + e.name);
    }
    }
    throw std::logic_error("eval_expr: bad node");
}

} // namespace raccess
