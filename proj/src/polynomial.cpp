#include "raccess/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "raccess/errors.hpp"

namespace raccess {

// ---------------------------------------------------------------------------
// VariableRegistry

RegistryPtr VariableRegistry::create(std::vector<std::string> params, std::vector<std::string> states,
                                     std::vector<std::string> inputs, int horizon) {
    if (horizon < 0) throw std::invalid_argument("VariableRegistry: negative horizon");
    std::shared_ptr<VariableRegistry> reg(new VariableRegistry());
    std::unordered_set<std::string> seen;
    auto claim = [&](const std::string& name) {
        if (name.empty()) throw std::invalid_argument("VariableRegistry: empty variable name");
        if (!seen.insert(name).second) throw std::invalid_argument("VariableRegistry: duplicate name '" + name + "'");
    };
    for (std::size_t i = 0; i < params.size(); ++i) {
        claim(params[i]);
        reg->symbols_.push_back({params[i], VarClass::parameter, params[i], 0, static_cast<int>(i)});
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
        claim(states[i]);
        reg->symbols_.push_back({states[i], VarClass::state, states[i], 0, static_cast<int>(i)});
    }
    for (const auto& base : inputs) claim(base);
    for (int t = 0; t < horizon; ++t) {
        for (std::size_t j = 0; j < inputs.size(); ++j) {
            std::string name = inputs[j] + "(" + std::to_string(t) + ")";
            claim(name);
            reg->symbols_.push_back({name, VarClass::input, inputs[j], t, static_cast<int>(j)});
        }
    }
    reg->params_ = std::move(params);
    reg->states_ = std::move(states);
    reg->inputs_ = std::move(inputs);
    reg->horizon_ = horizon;
    return reg;
}

std::size_t VariableRegistry::param_var(std::size_t i) const {
    if (i >= params_.size()) throw std::out_of_range("param_var");
    return i;
}

std::size_t VariableRegistry::state_var(std::size_t i) const {
    if (i >= states_.size()) throw std::out_of_range("state_var");
    return params_.size() + i;
}

std::size_t VariableRegistry::input_var(std::size_t slot, int time) const {
    if (slot >= inputs_.size() || time < 0 || time >= horizon_)
        throw std::out_of_range("input_var: slot " + std::to_string(slot) + " time " + std::to_string(time) +
                                " outside horizon " + std::to_string(horizon_));
    return params_.size() + states_.size() + static_cast<std::size_t>(time) * inputs_.size() + slot;
}

std::optional<std::size_t> VariableRegistry::find(const std::string& name) const {
    for (std::size_t i = 0; i < symbols_.size(); ++i)
        if (symbols_[i].name == name) return i;
    return std::nullopt;
}

std::vector<std::size_t> VariableRegistry::indices_of(VarClass kind) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < symbols_.size(); ++i)
        if (symbols_[i].kind == kind) out.push_back(i);
    return out;
}

bool VariableRegistry::same_as(const VariableRegistry& other) const {
    if (this == &other) return true;
    if (symbols_.size() != other.symbols_.size()) return false;
    for (std::size_t i = 0; i < symbols_.size(); ++i)
        if (symbols_[i].name != other.symbols_[i].name || symbols_[i].kind != other.symbols_[i].kind) return false;
    return true;
}

RegistryPtr VariableRegistry::with_horizon(int horizon) const { return create(params_, states_, inputs_, horizon); }

bool same_ring(const RegistryPtr& a, const RegistryPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return a->same_as(*b);
}

// ---------------------------------------------------------------------------
// Monomial

bool Monomial::divides(const Monomial& other) const {
    if (degree > other.degree) return false;
    for (std::size_t i = 0; i < exp.size(); ++i)
        if (exp[i] > other.exp[i]) return false;
    return true;
}

Monomial Monomial::operator*(const Monomial& other) const {
    Monomial out(exp.size());
    for (std::size_t i = 0; i < exp.size(); ++i) out.exp[i] = static_cast<std::uint16_t>(exp[i] + other.exp[i]);
    out.degree = degree + other.degree;
    return out;
}

Monomial Monomial::quotient(const Monomial& divisor) const {
    Monomial out(exp.size());
    for (std::size_t i = 0; i < exp.size(); ++i) out.exp[i] = static_cast<std::uint16_t>(exp[i] - divisor.exp[i]);
    out.degree = degree - divisor.degree;
    return out;
}

Monomial Monomial::lcm(const Monomial& a, const Monomial& b) {
    Monomial out(a.exp.size());
    for (std::size_t i = 0; i < a.exp.size(); ++i) {
        out.exp[i] = std::max(a.exp[i], b.exp[i]);
        out.degree += out.exp[i];
    }
    return out;
}

Monomial Monomial::gcd(const Monomial& a, const Monomial& b) {
    Monomial out(a.exp.size());
    for (std::size_t i = 0; i < a.exp.size(); ++i) {
        out.exp[i] = std::min(a.exp[i], b.exp[i]);
        out.degree += out.exp[i];
    }
    return out;
}

int grevlex_compare(const Monomial& a, const Monomial& b) {
    if (a.degree != b.degree) return a.degree > b.degree ? 1 : -1;
    for (std::size_t i = a.exp.size(); i-- > 0;) {
        if (a.exp[i] != b.exp[i]) return a.exp[i] < b.exp[i] ? 1 : -1;
    }
    return 0;
}

std::size_t MonomialHash::operator()(const Monomial& m) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (auto e : m.exp) {
        h ^= e;
        h *= 1099511628211ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Polynomial

namespace {

bool term_greater(const Term& a, const Term& b) { return grevlex_compare(a.mono, b.mono) > 0; }

} // namespace

Polynomial Polynomial::constant(RegistryPtr reg, const Rational& c) {
    Polynomial p(std::move(reg));
    if (c != 0) p.terms_.push_back({Monomial(p.reg_->size()), c});
    return p;
}

Polynomial Polynomial::variable(RegistryPtr reg, std::size_t var, unsigned power) {
    Polynomial p(std::move(reg));
    if (var >= p.reg_->size()) throw std::out_of_range("Polynomial::variable: index out of range");
    Monomial m(p.reg_->size());
    m.exp[var] = static_cast<std::uint16_t>(power);
    m.degree = power;
    p.terms_.push_back({std::move(m), 1});
    return p;
}

Polynomial Polynomial::monomial(RegistryPtr reg, Monomial mono, const Rational& c) {
    Polynomial p(std::move(reg));
    if (mono.arity() != p.reg_->size()) throw std::invalid_argument("Polynomial::monomial: arity mismatch");
    if (c != 0) p.terms_.push_back({std::move(mono), c});
    return p;
}

Polynomial Polynomial::from_terms(RegistryPtr reg, std::vector<Term> terms) {
    Polynomial p(std::move(reg));
    std::sort(terms.begin(), terms.end(), term_greater);
    for (auto& t : terms) {
        if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
            p.terms_.back().coeff += t.coeff;
            if (p.terms_.back().coeff == 0) p.terms_.pop_back();
        } else if (t.coeff != 0) {
            p.terms_.push_back(std::move(t));
        }
    }
    return p;
}

bool Polynomial::is_constant() const noexcept { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }

bool Polynomial::is_one() const { return terms_.size() == 1 && terms_[0].mono.is_one() && terms_[0].coeff == 1; }

Rational Polynomial::constant_term() const {
    if (!terms_.empty() && terms_.back().mono.is_one()) return terms_.back().coeff;
    return 0;
}

const Term& Polynomial::leading_term() const {
    if (terms_.empty()) throw std::logic_error("leading_term of zero polynomial");
    return terms_.front();
}

std::uint32_t Polynomial::total_degree() const {
    return terms_.empty() ? 0 : terms_.front().mono.degree;
}

int Polynomial::degree_in(std::size_t var) const {
    int d = terms_.empty() ? -1 : 0;
    for (const auto& t : terms_) d = std::max<int>(d, t.mono.exp[var]);
    return d;
}

bool Polynomial::uses(std::size_t var) const {
    for (const auto& t : terms_)
        if (t.mono.exp[var] != 0) return true;
    return false;
}

bool Polynomial::uses_class(VarClass kind) const {
    for (std::size_t v = 0; v < reg_->size(); ++v)
        if (reg_->symbol(v).kind == kind && uses(v)) return true;
    return false;
}

std::vector<std::size_t> Polynomial::variables() const {
    std::vector<std::size_t> out;
    if (!reg_) return out;
    for (std::size_t v = 0; v < reg_->size(); ++v)
        if (uses(v)) out.push_back(v);
    return out;
}

void Polynomial::require_same_ring(const Polynomial& other) const {
    if (!same_ring(reg_, other.reg_)) throw std::invalid_argument("polynomials over different registries");
}

Polynomial Polynomial::operator-() const {
    Polynomial p = *this;
    for (auto& t : p.terms_) t.coeff = -t.coeff;
    return p;
}

namespace {

std::vector<Term> merge_terms(const std::vector<Term>& a, const std::vector<Term>& b, bool subtract) {
    std::vector<Term> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        int c;
        if (i == a.size()) c = -1;
        else if (j == b.size()) c = 1;
        else c = grevlex_compare(a[i].mono, b[j].mono);
        if (c > 0) {
            out.push_back(a[i++]);
        } else if (c < 0) {
            out.push_back(b[j++]);
            if (subtract) out.back().coeff = -out.back().coeff;
        } else {
            Rational s = subtract ? Rational(a[i].coeff - b[j].coeff) : Rational(a[i].coeff + b[j].coeff);
            if (s != 0) out.push_back({a[i].mono, std::move(s)});
            ++i;
            ++j;
        }
    }
    return out;
}

} // namespace

Polynomial& Polynomial::operator+=(const Polynomial& other) {
    if (!reg_) reg_ = other.reg_;
    require_same_ring(other);
    if (other.terms_.empty()) return *this;
    terms_ = merge_terms(terms_, other.terms_, false);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
    if (!reg_) reg_ = other.reg_;
    require_same_ring(other);
    if (other.terms_.empty()) return *this;
    terms_ = merge_terms(terms_, other.terms_, true);
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.require_same_ring(b);
    Polynomial out(a.reg_);
    if (a.is_zero() || b.is_zero()) return out;
    if (a.terms_.size() == 1) return b.times_monomial(a.terms_[0].mono, a.terms_[0].coeff);
    if (b.terms_.size() == 1) return a.times_monomial(b.terms_[0].mono, b.terms_[0].coeff);
    std::unordered_map<Monomial, Rational, MonomialHash> acc;
    acc.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& ta : a.terms_) {
        for (const auto& tb : b.terms_) {
            auto [it, inserted] = acc.try_emplace(ta.mono * tb.mono);
            it->second += ta.coeff * tb.coeff;
        }
    }
    std::vector<Term> terms;
    terms.reserve(acc.size());
    for (auto& [m, c] : acc)
        if (c != 0) terms.push_back({m, std::move(c)});
    std::sort(terms.begin(), terms.end(), term_greater);
    out.terms_ = std::move(terms);
    return out;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) {
    *this = *this * other;
    return *this;
}

Polynomial Polynomial::scaled(const Rational& c) const {
    Polynomial p(reg_);
    if (c == 0) return p;
    p.terms_ = terms_;
    for (auto& t : p.terms_) t.coeff *= c;
    return p;
}

Polynomial Polynomial::times_monomial(const Monomial& mono, const Rational& c) const {
    Polynomial p(reg_);
    if (c == 0) return p;
    p.terms_.reserve(terms_.size());
    // Multiplication by a monomial preserves any monomial order.
    for (const auto& t : terms_) p.terms_.push_back({t.mono * mono, t.coeff * c});
    return p;
}

Polynomial Polynomial::pow(unsigned e) const {
    Polynomial result = constant(reg_, 1);
    Polynomial base = *this;
    while (e > 0) {
        if (e & 1U) result *= base;
        e >>= 1U;
        if (e > 0) base = base * base;
    }
    return result;
}

bool Polynomial::terms_equal(const Polynomial& other) const {
    if (terms_.size() != other.terms_.size()) return false;
    if (!terms_.empty() && !same_ring(reg_, other.reg_)) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (!(terms_[i].mono == other.terms_[i].mono) || terms_[i].coeff != other.terms_[i].coeff) return false;
    return true;
}

Polynomial Polynomial::derivative(std::size_t var) const {
    if (!reg_ || var >= reg_->size()) throw std::out_of_range("derivative: variable not registered");
    std::vector<Term> out;
    for (const auto& t : terms_) {
        if (t.mono.exp[var] == 0) continue;
        Term d{t.mono, t.coeff * static_cast<unsigned long>(t.mono.exp[var])};
        d.mono.exp[var] -= 1;
        d.mono.degree -= 1;
        out.push_back(std::move(d));
    }
    return from_terms(reg_, std::move(out));
}

Rational Polynomial::evaluate(const Assignment& point) const {
    Rational sum = 0;
    std::map<std::pair<std::size_t, unsigned>, Rational> powers;
    for (const auto& t : terms_) {
        Rational prod = t.coeff;
        for (std::size_t v = 0; v < t.mono.exp.size(); ++v) {
            const unsigned e = t.mono.exp[v];
            if (e == 0) continue;
            auto it = point.find(v);
            if (it == point.end())
                throw std::invalid_argument("evaluate: no value for variable '" + reg_->symbol(v).name + "'");
            auto key = std::make_pair(v, e);
            auto pw = powers.find(key);
            if (pw == powers.end()) {
                Rational r;
                mpz_pow_ui(r.get_num_mpz_t(), it->second.get_num_mpz_t(), e);
                mpz_pow_ui(r.get_den_mpz_t(), it->second.get_den_mpz_t(), e);
                pw = powers.emplace(key, r).first;
            }
            prod *= pw->second;
        }
        sum += prod;
    }
    return sum;
}

Polynomial Polynomial::partial_evaluate(const Assignment& point) const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
        Term nt{t.mono, t.coeff};
        for (const auto& [v, value] : point) {
            const unsigned e = nt.mono.exp[v];
            if (e == 0) continue;
            Rational r;
            mpz_pow_ui(r.get_num_mpz_t(), value.get_num_mpz_t(), e);
            mpz_pow_ui(r.get_den_mpz_t(), value.get_den_mpz_t(), e);
            nt.coeff *= r;
            nt.mono.exp[v] = 0;
            nt.mono.degree -= e;
        }
        out.push_back(std::move(nt));
    }
    return from_terms(reg_, std::move(out));
}

double Polynomial::evaluate_double(const std::vector<double>& values) const {
    double sum = 0.0;
    for (const auto& t : terms_) {
        double prod = t.coeff.get_d();
        for (std::size_t v = 0; v < t.mono.exp.size(); ++v) {
            const unsigned e = t.mono.exp[v];
            if (e == 0) continue;
            double x = values.at(v);
            double pw = 1.0;
            for (unsigned k = 0; k < e; ++k) pw *= x;
            prod *= pw;
        }
        sum += prod;
    }
    return sum;
}

Rational Polynomial::content() const {
    if (terms_.empty()) return 0;
    Integer num = 0, den = 1;
    for (const auto& t : terms_) {
        mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), t.coeff.get_num_mpz_t());
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), t.coeff.get_den_mpz_t());
    }
    Rational c(num, den);
    c.canonicalize();
    return c;
}

Polynomial Polynomial::primitive() const {
    if (terms_.empty()) return *this;
    Rational c = content();
    if (terms_.front().coeff < 0) c = -c;
    return scaled(1 / c);
}

Polynomial Polynomial::monic() const {
    if (terms_.empty()) return *this;
    return scaled(1 / terms_.front().coeff);
}

Polynomial Polynomial::embed(RegistryPtr target) const {
    if (same_ring(reg_, target)) {
        Polynomial p = *this;
        p.reg_ = std::move(target);
        return p;
    }
    const std::size_t na = std::min(reg_->size(), target->size());
    for (std::size_t i = 0; i < na; ++i)
        if (reg_->symbol(i).name != target->symbol(i).name)
            throw std::invalid_argument("embed: registries do not share a prefix");
    for (const auto& t : terms_)
        for (std::size_t i = na; i < t.mono.exp.size(); ++i)
            if (t.mono.exp[i] != 0)
                throw std::invalid_argument("embed: variable '" + reg_->symbol(i).name + "' missing from target");
    Polynomial p(std::move(target));
    p.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
        Term nt{Monomial(p.reg_->size()), t.coeff};
        std::copy(t.mono.exp.begin(), t.mono.exp.begin() + static_cast<std::ptrdiff_t>(na), nt.mono.exp.begin());
        nt.mono.degree = t.mono.degree;
        p.terms_.push_back(std::move(nt));
    }
    return p;
}

std::vector<Polynomial> Polynomial::coefficients_in(std::size_t var) const {
    const int d = degree_in(var);
    std::vector<std::vector<Term>> buckets(d < 0 ? 0 : static_cast<std::size_t>(d) + 1);
    for (const auto& t : terms_) {
        Term nt = t;
        const unsigned e = nt.mono.exp[var];
        nt.mono.exp[var] = 0;
        nt.mono.degree -= e;
        buckets[e].push_back(std::move(nt));
    }
    std::vector<Polynomial> out;
    out.reserve(buckets.size());
    for (auto& b : buckets) out.push_back(from_terms(reg_, std::move(b)));
    return out;
}

std::string Polynomial::to_string() const {
    return to_string([this](std::size_t v) { return reg_->symbol(v).name; });
}

std::string Polynomial::to_string(const std::function<std::string(std::size_t)>& name) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
        Rational mag = abs(t.coeff);
        if (first) {
            if (t.coeff < 0) os << "-";
        } else {
            os << (t.coeff < 0 ? " - " : " + ");
        }
        first = false;
        bool wrote = false;
        if (t.mono.is_one() || mag != 1) {
            os << mag.get_str();
            wrote = true;
        }
        for (std::size_t v = 0; v < t.mono.exp.size(); ++v) {
            if (t.mono.exp[v] == 0) continue;
            if (wrote) os << "*";
            os << name(v);
            if (t.mono.exp[v] > 1) os << "^" << t.mono.exp[v];
            wrote = true;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// collect / square-free

std::map<Monomial, Polynomial, GrevlexLess> collect_by_class(const Polynomial& p, VarClass kind) {
    const auto& reg = p.registry();
    std::map<Monomial, std::vector<Term>, GrevlexLess> buckets;
    for (const auto& t : p.terms()) {
        Monomial key(reg->size());
        Term rest = t;
        for (std::size_t v = 0; v < reg->size(); ++v) {
            if (reg->symbol(v).kind != kind || t.mono.exp[v] == 0) continue;
            key.exp[v] = t.mono.exp[v];
            key.degree += t.mono.exp[v];
            rest.mono.exp[v] = 0;
            rest.mono.degree -= t.mono.exp[v];
        }
        buckets[key].push_back(std::move(rest));
    }
    std::map<Monomial, Polynomial, GrevlexLess> out;
    for (auto& [k, terms] : buckets) {
        Polynomial c = Polynomial::from_terms(reg, std::move(terms));
        if (!c.is_zero()) out.emplace(k, std::move(c));
    }
    return out;
}

Polynomial square_free_part(const Polynomial& p) {
    if (p.is_zero()) throw std::invalid_argument("square_free_part: zero polynomial");
    if (p.is_constant()) return Polynomial::constant(p.registry(), 1);
    Polynomial g = p;
    for (std::size_t v : p.variables()) {
        g = gcd(g, p.derivative(v));
        if (g.is_constant()) break;
    }
    auto q = exact_divide(p, g);
    if (!q) throw std::logic_error("square_free_part: gcd does not divide");
    return q->primitive();
}

} // namespace raccess
