#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "raccess/errors.hpp"
#include "raccess/poly.hpp"

namespace raccess {

RationalFunction::RationalFunction(Polynomial num)
    : num_(std::move(num)), den_(Polynomial::constant(num_.registry(), 1)) {}

RationalFunction::RationalFunction(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw DegeneracyError("rational function with identically zero denominator");
    if (!same_ring(num_.registry(), den_.registry()))
        throw std::invalid_argument("rational function over mismatched registries");
    if (num_.is_zero()) {
        den_ = Polynomial::constant(num_.registry(), 1);
        return;
    }
    if (!den_.is_constant()) {
        Polynomial g = gcd(num_, den_);
        if (!g.is_constant()) {
            num_ = exact_divide(num_, g).value();
            den_ = exact_divide(den_, g).value();
        }
    }
    Rational c = den_.content();
    if (den_.leading_term().coeff < 0) c = -c;
    if (c != 1) {
        den_ = den_.scaled(1 / c);
        num_ = num_.scaled(1 / c);
    }
}

RationalFunction RationalFunction::constant(RegistryPtr reg, const Rational& c) {
    return RationalFunction(Polynomial::constant(std::move(reg), c));
}

RationalFunction RationalFunction::variable(RegistryPtr reg, std::size_t var) {
    return RationalFunction(Polynomial::variable(std::move(reg), var));
}

RationalFunction RationalFunction::operator-() const {
    RationalFunction r = *this;
    r.num_ = -r.num_;
    return r;
}

namespace {

// num/den is already reduced; only the unit normalization of den remains.
RationalFunction reduced(Polynomial num, Polynomial den) {
    if (num.is_zero()) return RationalFunction(std::move(num));
    return RationalFunction::from_reduced(std::move(num), std::move(den));
}

} // namespace

RationalFunction RationalFunction::from_reduced(Polynomial num, Polynomial den) {
    RationalFunction r;
    r.num_ = std::move(num);
    r.den_ = std::move(den);
    Rational c = r.den_.content();
    if (r.den_.leading_term().coeff < 0) c = -c;
    if (c != 1) {
        r.den_ = r.den_.scaled(1 / c);
        r.num_ = r.num_.scaled(1 / c);
    }
    return r;
}

// For reduced operands with g = gcd(den_a, den_b), every common factor of the
// sum's numerator and denominator divides g.
RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.den_ == b.den_) {
        if (a.is_polynomial()) return RationalFunction(a.num_ + b.num_);
        return RationalFunction(a.num_ + b.num_, a.den_);
    }
    if (a.is_polynomial()) return reduced(a.num_ * b.den_ + b.num_, b.den_);
    if (b.is_polynomial()) return reduced(a.num_ + b.num_ * a.den_, a.den_);
    Polynomial g = gcd(a.den_, b.den_);
    Polynomial da = exact_divide(a.den_, g).value();
    Polynomial db = exact_divide(b.den_, g).value();
    Polynomial num = a.num_ * db + b.num_ * da;
    Polynomial den = a.den_ * db;
    if (g.is_constant() || num.is_zero()) return reduced(std::move(num), std::move(den));
    Polynomial h = gcd(num, g);
    if (h.is_constant()) return reduced(std::move(num), std::move(den));
    return reduced(exact_divide(num, h).value(), exact_divide(den, h).value());
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero() || b.is_zero()) return RationalFunction(Polynomial(a.registry()));
    if (a.is_polynomial() && b.is_polynomial()) return RationalFunction(a.num_ * b.num_);
    // Cross-cancel: a.num/b.den and b.num/a.den are the only possible common factors.
    Polynomial g1 = b.is_polynomial() ? Polynomial::constant(a.registry(), 1) : gcd(a.num_, b.den_);
    Polynomial g2 = a.is_polynomial() ? Polynomial::constant(a.registry(), 1) : gcd(b.num_, a.den_);
    Polynomial an = g1.is_constant() ? a.num_ : exact_divide(a.num_, g1).value();
    Polynomial bd = g1.is_constant() ? b.den_ : exact_divide(b.den_, g1).value();
    Polynomial bn = g2.is_constant() ? b.num_ : exact_divide(b.num_, g2).value();
    Polynomial ad = g2.is_constant() ? a.den_ : exact_divide(a.den_, g2).value();
    RationalFunction r;
    r.num_ = an * bn;
    r.den_ = ad * bd;
    Rational c = r.den_.content();
    if (r.den_.leading_term().coeff < 0) c = -c;
    if (c != 1) {
        r.den_ = r.den_.scaled(1 / c);
        r.num_ = r.num_.scaled(1 / c);
    }
    return r;
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.is_zero()) throw DegeneracyError("division by identically zero rational function");
    RationalFunction inv;
    inv.num_ = b.den_;
    inv.den_ = b.num_;
    Rational c = inv.den_.content();
    if (inv.den_.leading_term().coeff < 0) c = -c;
    inv.den_ = inv.den_.scaled(1 / c);
    inv.num_ = inv.num_.scaled(1 / c);
    return a * inv;
}

RationalFunction RationalFunction::pow(int e) const {
    if (e < 0) {
        if (is_zero()) throw DegeneracyError("negative power of zero");
        return RationalFunction(den_.pow(static_cast<unsigned>(-e)), num_.pow(static_cast<unsigned>(-e)));
    }
    RationalFunction r;
    r.num_ = num_.pow(static_cast<unsigned>(e));
    r.den_ = den_.pow(static_cast<unsigned>(e));
    return r;
}

RationalFunction RationalFunction::embed(RegistryPtr target) const {
    RationalFunction r;
    r.num_ = num_.embed(target);
    r.den_ = den_.embed(target);
    return r;
}

std::string RationalFunction::to_string() const {
    return to_string([this](std::size_t v) { return registry()->symbol(v).name; });
}

std::string RationalFunction::to_string(const std::function<std::string(std::size_t)>& name) const {
    if (is_polynomial()) return num_.to_string(name);
    auto wrap = [&](const Polynomial& p) {
        std::string s = p.to_string(name);
        if (p.size() > 1 || (p.size() == 1 && (p.leading_term().coeff < 0 || (!p.leading_term().mono.is_one() &&
                                                    abs(p.leading_term().coeff) != 1))))
            return "(" + s + ")";
        return s;
    };
    return wrap(num_) + "/" + wrap(den_);
}

RationalFunction differentiate(const RationalFunction& f, std::size_t var) {
    if (!f.registry() || var >= f.registry()->size())
        throw std::out_of_range("differentiate: variable not registered");
    if (f.is_polynomial()) return RationalFunction(f.num().derivative(var));
    Polynomial n = f.num().derivative(var) * f.den() - f.num() * f.den().derivative(var);
    return RationalFunction(std::move(n), f.den() * f.den());
}

namespace {

struct PowerCache {
    std::vector<Polynomial> pw;
    const Polynomial* base;

    const Polynomial& get(unsigned k) {
        while (pw.size() <= k) pw.push_back(pw.back() * *base);
        return pw[k];
    }
};

// p(sigma) = num / den, with num and den polynomials.
void substitute_polynomial(const Polynomial& p, const Bindings& bindings, Polynomial& num, Polynomial& den) {
    const auto& reg = p.registry();
    std::vector<std::size_t> bound;
    for (const auto& [v, rf] : bindings)
        if (p.uses(v)) bound.push_back(v);

    const Polynomial one = Polynomial::constant(reg, 1);
    std::map<std::size_t, PowerCache> nums, dens;
    std::map<std::size_t, unsigned> maxdeg;
    for (std::size_t v : bound) {
        const auto& rf = bindings.at(v);
        nums[v] = PowerCache{{one}, &rf.num()};
        dens[v] = PowerCache{{one}, &rf.den()};
        maxdeg[v] = static_cast<unsigned>(p.degree_in(v));
    }

    // Group terms by their exponents in the bound variables so every
    // distinct power product is formed once.
    std::map<std::vector<std::uint16_t>, std::vector<Term>> groups;
    for (const auto& t : p.terms()) {
        std::vector<std::uint16_t> key;
        key.reserve(bound.size());
        Term rest = t;
        for (std::size_t v : bound) {
            key.push_back(t.mono.exp[v]);
            rest.mono.degree -= rest.mono.exp[v];
            rest.mono.exp[v] = 0;
        }
        groups[key].push_back(std::move(rest));
    }

    num = Polynomial(reg);
    for (auto& [key, terms] : groups) {
        Polynomial factor = one;
        for (std::size_t i = 0; i < bound.size(); ++i) {
            const std::size_t v = bound[i];
            const unsigned e = key[i];
            if (e > 0) factor *= nums[v].get(e);
            if (!bindings.at(v).is_polynomial() && maxdeg[v] > e) factor *= dens[v].get(maxdeg[v] - e);
        }
        num += factor * Polynomial::from_terms(reg, std::move(terms));
    }
    den = one;
    for (std::size_t v : bound)
        if (!bindings.at(v).is_polynomial()) den *= dens[v].get(maxdeg[v]);
}

} // namespace

RationalFunction substitute(const RationalFunction& f, const Bindings& bindings) {
    for (const auto& [v, rf] : bindings) {
        if (!same_ring(rf.registry(), f.registry()))
            throw std::invalid_argument("substitute: binding for '" + f.registry()->symbol(v).name +
                                        "' lives over a different registry");
    }
    Polynomial nn, nd, dn, dd;
    substitute_polynomial(f.num(), bindings, nn, nd);
    if (f.is_polynomial()) return RationalFunction(std::move(nn), std::move(nd));
    substitute_polynomial(f.den(), bindings, dn, dd);
    if (dn.is_zero()) {
        std::ostringstream os;
        os << "substitution makes the denominator " << f.den().to_string() << " identically zero (bindings:";
        for (const auto& [v, rf] : bindings)
            if (f.den().uses(v)) os << " " << f.registry()->symbol(v).name << " -> " << rf.to_string();
        os << ")";
        throw DegeneracyError(os.str());
    }
    return RationalFunction(nn * dd, nd * dn);
}

Rational evaluate(const RationalFunction& f, const Assignment& point) {
    Rational d = f.den().evaluate(point);
    Rational n = f.num().evaluate(point);
    if (d == 0) {
        if (n == 0)
            throw EvaluationError(EvaluationError::Kind::indeterminate,
                                  "0/0 at evaluation point for " + f.to_string());
        throw EvaluationError(EvaluationError::Kind::pole, "pole at evaluation point for " + f.to_string());
    }
    return n / d;
}

} // namespace raccess
