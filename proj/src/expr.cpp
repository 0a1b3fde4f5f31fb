#include "raccess/expr.hpp"

#include <cctype>
#include <vector>

#include "raccess/errors.hpp"

namespace raccess {

bool is_function_name(std::string_view name) {
    return name == "sin" || name == "cos" || name == "tan" || name == "exp" || name == "log" || name == "sqrt";
}

namespace {

struct Token {
    enum class Kind { number, ident, op, end };
    Kind kind = Kind::end;
    std::string text;
    int line = 1;
    int column = 1;
};

std::vector<Token> tokenize(std::string_view text, int line, int column) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto col = [&](std::size_t pos) { return column + static_cast<int>(pos); };
    while (i < text.size()) {
        char c = text[i];
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < text.size() &&
                                                             std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j < text.size() && text[j] == '.') {
                ++j;
                while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            }
            out.push_back({Token::Kind::number, std::string(text.substr(i, j - i)), line, col(i)});
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            out.push_back({Token::Kind::ident, std::string(text.substr(i, j - i)), line, col(i)});
            i = j;
            continue;
        }
        if (std::string_view("+-*/^()").find(c) != std::string_view::npos) {
            out.push_back({Token::Kind::op, std::string(1, c), line, col(i)});
            ++i;
            continue;
        }
        throw ParseError(line, col(i), std::string("unexpected character '") + c + "'");
    }
    out.push_back({Token::Kind::end, "", line, col(text.size())});
    return out;
}

Rational parse_decimal(const std::string& s) {
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(Integer(s, 10));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    if (digits.empty()) digits = "0";
    Integer den = 1;
    for (std::size_t k = dot + 1; k < s.size(); ++k) den *= 10;
    Rational r(Integer(digits, 10), den);
    r.canonicalize();
    return r;
}

class Parser {
public:
    Parser(std::vector<Token> toks, const VariableRegistry& reg, bool numeric_only)
        : toks_(std::move(toks)), reg_(reg), numeric_(numeric_only) {}

    ExprPtr parse() {
        if (peek().kind == Token::Kind::end) error(peek(), "empty expression");
        ExprPtr e = expr();
        if (peek().kind != Token::Kind::end) {
            const Token& t = peek();
            if (t.text == ")") error(t, "unbalanced ')'");
            error(t, "unexpected '" + t.text + "'");
        }
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() { return toks_[pos_++]; }
    bool is_op(const std::string& s) const { return peek().kind == Token::Kind::op && peek().text == s; }

    [[noreturn]] void error(const Token& t, const std::string& msg) const { throw ParseError(t.line, t.column, msg); }

    static ExprPtr node(Expr::Op op, const Token& at, ExprPtr lhs = nullptr, ExprPtr rhs = nullptr) {
        auto e = std::make_shared<Expr>();
        e->op = op;
        e->lhs = std::move(lhs);
        e->rhs = std::move(rhs);
        e->line = at.line;
        e->column = at.column;
        return e;
    }

    ExprPtr expr() {
        ExprPtr lhs = term();
        while (is_op("+") || is_op("-")) {
            const Token& t = advance();
            ExprPtr rhs = term();
            lhs = node(t.text == "+" ? Expr::Op::add : Expr::Op::sub, t, lhs, rhs);
        }
        return lhs;
    }

    ExprPtr term() {
        ExprPtr lhs = unary();
        while (is_op("*") || is_op("/")) {
            const Token& t = advance();
            if (t.text == "/" && (is_op("/") || is_op("*") || is_op(")") || peek().kind == Token::Kind::end))
                error(t, "misplaced '/': expected a divisor");
            ExprPtr rhs = unary();
            lhs = node(t.text == "*" ? Expr::Op::mul : Expr::Op::div, t, lhs, rhs);
        }
        return lhs;
    }

    ExprPtr unary() {
        if (is_op("-")) {
            const Token& t = advance();
            return node(Expr::Op::neg, t, unary());
        }
        if (is_op("+")) {
            advance();
            return unary();
        }
        return power();
    }

    int exponent() {
        bool paren = false;
        if (is_op("(")) {
            advance();
            paren = true;
        }
        int sign = 1;
        if (is_op("-") || is_op("+")) sign = advance().text == "-" ? -1 : 1;
        const Token& t = peek();
        if (t.kind != Token::Kind::number || t.text.find('.') != std::string::npos)
            error(t, "'^' requires an integer exponent");
        advance();
        if (paren) {
            if (!is_op(")")) error(peek(), "'^' requires an integer exponent");
            advance();
        }
        if (t.text.size() > 6) error(t, "exponent too large");
        return sign * std::stoi(t.text);
    }

    ExprPtr power() {
        ExprPtr base = primary();
        if (is_op("^")) {
            const Token& t = advance();
            auto e = std::make_shared<Expr>(*node(Expr::Op::pow, t, base));
            e->exponent = exponent();
            return e;
        }
        return base;
    }

    ExprPtr primary() {
        const Token& t = peek();
        if (t.kind == Token::Kind::number) {
            advance();
            auto e = std::make_shared<Expr>(*node(Expr::Op::number, t));
            e->number = parse_decimal(t.text);
            return e;
        }
        if (t.kind == Token::Kind::ident) return identifier();
        if (is_op("(")) {
            advance();
            ExprPtr e = expr();
            if (!is_op(")")) error(peek(), "expected ')'");
            advance();
            return e;
        }
        if (is_op("/")) error(t, "misplaced '/': expected an operand before it");
        if (t.kind == Token::Kind::end) error(t, "unexpected end of expression");
        error(t, "unexpected '" + t.text + "'");
    }

    ExprPtr variable(const Token& at, std::size_t var) {
        auto e = std::make_shared<Expr>(*node(Expr::Op::variable, at));
        e->var = var;
        e->name = reg_.symbol(var).name;
        return e;
    }

    ExprPtr identifier() {
        const Token t = advance();
        const std::string& name = t.text;
        for (const auto& base : reg_.input_names()) {
            if (base != name) continue;
            int time = 0;
            if (is_op("(")) {
                advance();
                const Token& nt = peek();
                if (nt.kind != Token::Kind::number || nt.text.find('.') != std::string::npos)
                    error(nt, "input time index must be a nonnegative integer");
                advance();
                if (!is_op(")")) error(peek(), "expected ')'");
                advance();
                time = std::stoi(nt.text);
            }
            std::size_t slot = 0;
            while (reg_.input_names()[slot] != name) ++slot;
            if (time >= reg_.horizon()) error(t, "input time " + std::to_string(time) + " outside horizon");
            return variable(t, reg_.input_var(slot, time));
        }
        if (auto idx = reg_.find(name)) {
            if (reg_.symbol(*idx).kind != VarClass::input) return variable(t, *idx);
            // display names such as u(0) are not identifiers; fall through
        }
        if (is_function_name(name)) {
            if (!numeric_) error(t, "transcendental function '" + name + "' is only allowed in numeric mode");
            if (!is_op("(")) error(peek(), "expected '(' after '" + name + "'");
            advance();
            ExprPtr arg = expr();
            if (!is_op(")")) error(peek(), "expected ')'");
            advance();
            auto e = std::make_shared<Expr>(*node(Expr::Op::call, t, arg));
            e->name = name;
            return e;
        }
        if (name == "pi") {
            if (!numeric_) error(t, "constant 'pi' is only allowed in numeric mode");
            return node(Expr::Op::pi, t);
        }
        error(t, "undeclared symbol '" + name + "'");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const VariableRegistry& reg_;
    bool numeric_;
};

} // namespace

ExprPtr parse_expression(std::string_view text, const VariableRegistry& reg, bool numeric_only, int line,
                         int column) {
    Parser p(tokenize(text, line, column), reg, numeric_only);
    return p.parse();
}

bool is_transcendental(const Expr& e) {
    if (e.op == Expr::Op::call || e.op == Expr::Op::pi) return true;
    if (e.lhs && is_transcendental(*e.lhs)) return true;
    if (e.rhs && is_transcendental(*e.rhs)) return true;
    return false;
}

RationalFunction to_rational(const Expr& e, const RegistryPtr& reg) {
    switch (e.op) {
    case Expr::Op::number: return RationalFunction::constant(reg, e.number);
    case Expr::Op::variable: return RationalFunction::variable(reg, e.var);
    case Expr::Op::neg: return -to_rational(*e.lhs, reg);
    case Expr::Op::add: return to_rational(*e.lhs, reg) + to_rational(*e.rhs, reg);
    case Expr::Op::sub: return to_rational(*e.lhs, reg) - to_rational(*e.rhs, reg);
    case Expr::Op::mul: return to_rational(*e.lhs, reg) * to_rational(*e.rhs, reg);
    case Expr::Op::div: {
        RationalFunction d = to_rational(*e.rhs, reg);
        if (d.is_zero()) throw ParseError(e.line, e.column, "division by an identically zero expression");
        return to_rational(*e.lhs, reg) / d;
    }
    case Expr::Op::pow: {
        RationalFunction b = to_rational(*e.lhs, reg);
        if (e.exponent < 0 && b.is_zero()) throw ParseError(e.line, e.column, "negative power of zero");
        return b.pow(e.exponent);
    }
    case Expr::Op::pi:
    case Expr::Op::call:
        throw ParseError(e.line, e.column, "transcendental expression has no exact rational form");
    }
    throw std::logic_error("to_rational: bad node");
}

RationalFunction parse_rational(std::string_view text, const RegistryPtr& reg) {
    return to_rational(*parse_expression(text, *reg, false), reg);
}

} // namespace raccess
