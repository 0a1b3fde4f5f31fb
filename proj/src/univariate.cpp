#include "raccess/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace raccess {

UPoly::UPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

UPoly UPoly::constant(const Rational& c) { return UPoly(std::vector<Rational>{c}); }

UPoly UPoly::identity() { return UPoly(std::vector<Rational>{0, 1}); }

void UPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational UPoly::eval(const Rational& t) const {
    Rational acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
    return acc;
}

double UPoly::eval_double(double t) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + it->get_d();
    return acc;
}

UPoly UPoly::derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Rational> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long>(i);
    return UPoly(std::move(d));
}

UPoly UPoly::monic() const {
    if (c_.empty()) return {};
    return scaled(1 / lead());
}

UPoly UPoly::scaled(const Rational& c) const {
    std::vector<Rational> out(c_);
    for (auto& x : out) x *= c;
    return UPoly(std::move(out));
}

UPoly operator+(const UPoly& a, const UPoly& b) {
    std::vector<Rational> out(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < a.c_.size(); ++i) out[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) out[i] += b.c_[i];
    return UPoly(std::move(out));
}

UPoly operator-(const UPoly& a, const UPoly& b) {
    std::vector<Rational> out(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < a.c_.size(); ++i) out[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) out[i] -= b.c_[i];
    return UPoly(std::move(out));
}

UPoly operator*(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> out(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    return UPoly(std::move(out));
}

void UPoly::divmod(const UPoly& divisor, UPoly& quotient, UPoly& remainder) const {
    if (divisor.is_zero()) throw std::invalid_argument("UPoly::divmod: division by zero polynomial");
    std::vector<Rational> r(c_);
    const int db = divisor.degree();
    std::vector<Rational> q(c_.size() >= divisor.c_.size() ? c_.size() - divisor.c_.size() + 1 : 0);
    for (int i = static_cast<int>(r.size()) - 1; i >= db; --i) {
        if (r[i] == 0) continue;
        Rational f = r[i] / divisor.lead();
        q[i - db] = f;
        for (int j = 0; j <= db; ++j) r[i - db + j] -= f * divisor.c_[j];
    }
    quotient = UPoly(std::move(q));
    remainder = UPoly(std::move(r));
}

UPoly UPoly::rem(const UPoly& divisor) const {
    UPoly q, r;
    divmod(divisor, q, r);
    return r;
}

std::string UPoly::to_string(const std::string& var) const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        const Rational& a = c_[i];
        if (a == 0) continue;
        Rational mag = abs(a);
        if (!first) os << (a < 0 ? " - " : " + ");
        else if (a < 0) os << "-";
        first = false;
        if (i == 0 || mag != 1) os << mag.get_str() << (i > 0 ? "*" : "");
        if (i > 0) os << var;
        if (i > 1) os << "^" << i;
    }
    return os.str();
}

UPoly gcd(const UPoly& a, const UPoly& b) {
    UPoly x = a, y = b;
    while (!y.is_zero()) {
        UPoly r = x.rem(y);
        x = std::move(y);
        y = std::move(r);
    }
    return x.monic();
}

UPoly square_free_part(const UPoly& p) {
    if (p.degree() <= 0) return p.monic();
    UPoly g = gcd(p, p.derivative());
    UPoly q, r;
    p.divmod(g, q, r);
    return q.monic();
}

Rational simplest_rational_between(const Rational& lo, const Rational& hi) {
    if (hi < lo) return simplest_rational_between(hi, lo);
    if (lo <= 0 && hi >= 0) return 0;
    if (hi < 0) return -simplest_rational_between(-hi, -lo);
    // 0 < lo <= hi
    Integer fl;
    mpz_fdiv_q(fl.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    if (Rational(fl) == lo) return lo;
    if (Rational(fl + 1) <= hi) return Rational(fl + 1);
    Rational inner = simplest_rational_between(1 / (hi - fl), 1 / (lo - fl));
    return Rational(fl) + 1 / inner;
}

namespace {

std::vector<UPoly> sturm_sequence(const UPoly& p) {
    std::vector<UPoly> seq{p, p.derivative()};
    while (!seq.back().is_zero()) {
        UPoly r = seq[seq.size() - 2].rem(seq.back());
        if (r.is_zero()) break;
        seq.push_back(r.scaled(-1));
    }
    if (seq.back().is_zero()) seq.pop_back();
    return seq;
}

int sign_of(const Rational& v) { return sgn(v); }

int variations(const std::vector<UPoly>& seq, const Rational& t) {
    int count = 0;
    int prev = 0;
    for (const auto& s : seq) {
        int sg = sign_of(s.eval(t));
        if (sg == 0) continue;
        if (prev != 0 && sg != prev) ++count;
        prev = sg;
    }
    return count;
}

Rational cauchy_bound(const UPoly& p) {
    Rational mx = 0;
    for (int i = 0; i < p.degree(); ++i) mx = std::max(mx, Rational(abs(p.coeffs()[i] / p.lead())));
    return mx + 1;
}

// p integer-scaled leading coefficient magnitude: bounds rational-root denominators.
Integer leading_integer(const UPoly& p) {
    Integer l = 1;
    for (const auto& c : p.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    Rational scaled_lead = p.lead() * Rational(l);
    Integer g = 0;
    for (const auto& c : p.coeffs()) {
        Rational s = c * Rational(l);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), s.get_num_mpz_t());
    }
    Integer lead = scaled_lead.get_num() / g;
    return abs(lead);
}

void isolate(const std::vector<UPoly>& seq, const UPoly& p, const Rational& lo, const Rational& hi, int vlo, int vhi,
             std::vector<RootInterval>& out) {
    const int count = vlo - vhi;
    if (count <= 0) return;
    if (count == 1) {
        if (p.eval(hi) == 0) out.push_back({hi, hi, true});
        else out.push_back({lo, hi, false});
        return;
    }
    Rational mid = (lo + hi) / 2;
    int vmid = variations(seq, mid);
    isolate(seq, p, lo, mid, vlo, vmid, out);
    isolate(seq, p, mid, hi, vmid, vhi, out);
}

RootInterval bisect_once(const UPoly& p, const RootInterval& r) {
    Rational mid = (r.lo + r.hi) / 2;
    Rational vm = p.eval(mid);
    if (vm == 0) return {mid, mid, true};
    int slo = sign_of(p.eval(r.lo));
    if (slo == 0) slo = -sign_of(p.eval(r.hi));
    if (sign_of(vm) == slo) return {mid, r.hi, false};
    return {r.lo, mid, false};
}

} // namespace

RootInterval refine_root(const UPoly& p, RootInterval root, const Rational& width) {
    UPoly sq = square_free_part(p);
    while (!root.exact && root.hi - root.lo >= width) root = bisect_once(sq, root);
    return root;
}

std::vector<RootInterval> isolate_real_roots(const UPoly& p) {
    if (p.is_zero()) throw std::invalid_argument("isolate_real_roots: zero polynomial");
    std::vector<RootInterval> out;
    if (p.degree() == 0) return out;
    UPoly sq = square_free_part(p);
    auto seq = sturm_sequence(sq);
    Rational bound = cauchy_bound(sq);
    isolate(seq, sq, -bound, bound, variations(seq, -bound), variations(seq, bound), out);

    // Rational roots have denominators dividing the integer leading coefficient;
    // two such rationals are at least 1/lead^2 apart.
    Integer lead = leading_integer(sq);
    Rational sep = Rational(1) / Rational(lead * lead * 2);
    for (auto& r : out) {
        if (r.exact) continue;
        // Endpoints of isolating intervals are never roots here, so the open
        // interval is safe to bisect.
        while (!r.exact && r.hi - r.lo >= sep) r = bisect_once(sq, r);
        if (r.exact) continue;
        Rational cand = simplest_rational_between(r.lo, r.hi);
        if (Integer(cand.get_den()) <= lead && sq.eval(cand) == 0) r = {cand, cand, true};
    }
    return out;
}

std::size_t count_real_roots(const UPoly& p) {
    if (p.degree() <= 0) return 0;
    UPoly sq = square_free_part(p);
    auto seq = sturm_sequence(sq);
    Rational bound = cauchy_bound(sq);
    return static_cast<std::size_t>(variations(seq, -bound) - variations(seq, bound));
}

} // namespace raccess
