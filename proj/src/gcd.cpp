// Multivariate gcd over Q. A modular specialization filter settles the
// common coprime case, a heuristic evaluation gcd handles most of the rest,
// and recursive primitive remainder sequences are the fallback.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>

#include "raccess/poly.hpp"
#include "raccess/univariate.hpp"

namespace raccess {

std::optional<Polynomial> exact_divide(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) throw std::invalid_argument("exact_divide: division by zero polynomial");
    if (a.is_zero()) return Polynomial(a.registry());
    if (b.is_constant()) return a.scaled(1 / b.leading_term().coeff);
    if (b.total_degree() > a.total_degree()) return std::nullopt;
    for (std::size_t v : b.variables())
        if (b.degree_in(v) > a.degree_in(v)) return std::nullopt;

    const Term& lb = b.leading_term();
    std::vector<Term> q;
    std::map<Monomial, Rational, GrevlexLess> r;
    for (const auto& t : a.terms()) r.emplace(t.mono, t.coeff);
    Rational c;
    while (!r.empty()) {
        auto top = std::prev(r.end());
        if (!lb.mono.divides(top->first)) return std::nullopt;
        Monomial m = top->first.quotient(lb.mono);
        c = top->second / lb.coeff;
        for (const auto& t : b.terms()) {
            Monomial mm = t.mono * m;
            auto [it, fresh] = r.try_emplace(std::move(mm));
            it->second -= c * t.coeff;
            if (it->second == 0) r.erase(it);
        }
        q.push_back({std::move(m), c});
    }
    return Polynomial::from_terms(a.registry(), std::move(q));
}

namespace {

constexpr std::uint64_t kPrime = 2305843009213693951ULL;  // 2^61 - 1

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % kPrime);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
        if (e & 1) r = mulmod(r, a);
        a = mulmod(a, a);
        e >>= 1;
    }
    return r;
}

std::uint64_t invmod(std::uint64_t a) { return powmod(a, kPrime - 2); }

std::uint64_t reduce_mod(const Integer& z) {
    static_assert(sizeof(unsigned long) == sizeof(std::uint64_t));
    return mpz_fdiv_ui(z.get_mpz_t(), kPrime);
}

using ModPoly = std::vector<std::uint64_t>;  // coefficient of x^i at index i

void trim(ModPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

int mod_degree(const ModPoly& p) { return static_cast<int>(p.size()) - 1; }

ModPoly mod_gcd(ModPoly a, ModPoly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        const std::uint64_t inv = invmod(b.back());
        while (a.size() >= b.size()) {
            const std::uint64_t f = mulmod(a.back(), inv);
            const std::size_t off = a.size() - b.size();
            for (std::size_t i = 0; i < b.size(); ++i) {
                std::uint64_t t = mulmod(f, b[i]);
                a[off + i] = a[off + i] >= t ? a[off + i] - t : a[off + i] + kPrime - t;
            }
            trim(a);
            if (a.empty()) break;
        }
        std::swap(a, b);
    }
    return a;
}

// Image of integer-primitive p in F_p[var] with the other variables set to `values`.
ModPoly specialize_mod(const Polynomial& p, std::size_t var, const std::vector<std::uint64_t>& values) {
    ModPoly out(static_cast<std::size_t>(std::max(p.degree_in(var), 0)) + 1, 0);
    for (const auto& t : p.terms()) {
        std::uint64_t c = reduce_mod(t.coeff.get_num());
        for (std::size_t v = 0; v < t.mono.exp.size() && c; ++v) {
            if (v == var || t.mono.exp[v] == 0) continue;
            c = mulmod(c, powmod(values[v], t.mono.exp[v]));
        }
        std::uint64_t& slot = out[t.mono.exp[var]];
        slot = (slot + c) % kPrime;
    }
    trim(out);
    return out;
}

// True when specialization modulo a prime proves gcd(a, b) constant. A
// nonconstant gcd g depends on some shared variable v; its leading
// v-coefficient divides those of a and b, so g keeps its v-degree in every
// image where the leading v-coefficients of a and b survive.
bool coprime_by_specialization(const Polynomial& a0, const Polynomial& b0, const std::vector<std::size_t>& common) {
    const Polynomial a = a0.primitive(), b = b0.primitive();
    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<std::uint64_t> dist(1, kPrime - 1);
    const std::size_t arity = a.registry()->size();
    for (std::size_t v : common) {
        bool settled = false;
        for (int attempt = 0; attempt < 4 && !settled; ++attempt) {
            std::vector<std::uint64_t> values(arity);
            for (auto& x : values) x = dist(rng);
            ModPoly ua = specialize_mod(a, v, values);
            ModPoly ub = specialize_mod(b, v, values);
            if (mod_degree(ua) != a.degree_in(v) || mod_degree(ub) != b.degree_in(v)) continue;
            if (mod_degree(mod_gcd(ua, ub)) > 0) return false;
            settled = true;
        }
        if (!settled) return false;
    }
    return true;
}

// Heuristic gcd over Z: evaluate one variable at a large integer, recurse,
// and read the candidate back from its balanced xi-adic digits. A candidate
// is accepted only after dividing both inputs exactly.
Integer max_norm(const Polynomial& p) {
    Integer m = 0;
    for (const auto& t : p.terms()) {
        Integer c = abs(t.coeff.get_num());
        if (c > m) m = c;
    }
    return m;
}

Polynomial evaluate_at(const Polynomial& p, std::size_t var, const Integer& xi) {
    std::vector<Integer> powers{Integer(1)};
    std::vector<Term> terms;
    terms.reserve(p.size());
    for (const auto& t : p.terms()) {
        const unsigned e = t.mono.exp[var];
        while (powers.size() <= e) powers.push_back(powers.back() * xi);
        Term nt{t.mono, Rational(t.coeff.get_num() * powers[e])};
        nt.mono.exp[var] = 0;
        nt.mono.degree -= e;
        terms.push_back(std::move(nt));
    }
    return Polynomial::from_terms(p.registry(), std::move(terms));
}

Polynomial interpolate(Polynomial g, std::size_t var, const Integer& xi) {
    const Integer half = xi / 2;
    std::vector<Term> out;
    unsigned power = 0;
    while (!g.is_zero()) {
        std::vector<Term> digit, rest;
        for (const auto& t : g.terms()) {
            Integer c = t.coeff.get_num();
            Integer r;
            mpz_fdiv_r(r.get_mpz_t(), c.get_mpz_t(), xi.get_mpz_t());
            if (r > half) r -= xi;
            if (r != 0) {
                Term d{t.mono, Rational(r)};
                d.mono.exp[var] = static_cast<std::uint16_t>(power);
                d.mono.degree += power;
                out.push_back(std::move(d));
            }
            Integer q = (c - r) / xi;
            if (q != 0) rest.push_back({t.mono, Rational(q)});
        }
        g = Polynomial::from_terms(g.registry(), std::move(rest));
        ++power;
        if (power > 60000) break;
    }
    return Polynomial::from_terms(g.registry(), std::move(out));
}

constexpr std::size_t kHeuristicBitLimit = 1u << 16;

Integer integer_content(const Polynomial& p) {
    Integer g = 0;
    for (const auto& t : p.terms()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coeff.get_num_mpz_t());
    return g;
}

// Full gcd (integer content included) of integer polynomials a, b.
std::optional<Polynomial> heuristic_gcd(const Polynomial& a0, const Polynomial& b0, std::vector<std::size_t> vars) {
    const auto& reg = a0.registry();
    const Integer ca = integer_content(a0), cb = integer_content(b0);
    Integer c;
    mpz_gcd(c.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
    if (vars.empty()) return Polynomial::constant(reg, Rational(c));
    const Polynomial a = a0.scaled(Rational(1) / Rational(ca)), b = b0.scaled(Rational(1) / Rational(cb));
    const std::size_t var = vars.back();
    vars.pop_back();
    Integer xi = 2 * std::min(max_norm(a), max_norm(b)) + 29;
    for (int attempt = 0; attempt < 6; ++attempt) {
        if (mpz_sizeinbase(xi.get_mpz_t(), 2) > kHeuristicBitLimit) return std::nullopt;
        Polynomial ea = evaluate_at(a, var, xi), eb = evaluate_at(b, var, xi);
        if (!ea.is_zero() && !eb.is_zero()) {
            auto g = heuristic_gcd(ea, eb, vars);
            if (!g) return std::nullopt;
            Polynomial h = interpolate(*g, var, xi);
            if (!h.is_zero()) {
                h = h.scaled(Rational(1) / Rational(integer_content(h)));
                if (exact_divide(a, h) && exact_divide(b, h)) return h.scaled(Rational(c));
            }
        }
        Integer root;
        mpz_sqrt(root.get_mpz_t(), xi.get_mpz_t());
        mpz_sqrt(root.get_mpz_t(), root.get_mpz_t());
        xi = xi * 73794 * root / 27011;
    }
    return std::nullopt;
}

Polynomial one_like(const Polynomial& p) { return Polynomial::constant(p.registry(), 1); }

Polynomial gcd_rec(const Polynomial& a, const Polynomial& b);

Polynomial content_in(const Polynomial& p, std::size_t var) {
    auto coeffs = p.coefficients_in(var);
    Polynomial g(p.registry());
    for (auto& c : coeffs) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? c.primitive() : gcd_rec(g, c);
        if (g.is_constant()) return one_like(p);
    }
    return g.primitive();
}

Polynomial primitive_in(const Polynomial& p, std::size_t var) {
    Polynomial c = content_in(p, var);
    if (c.is_constant()) return p.primitive();
    return exact_divide(p, c).value().primitive();
}

Polynomial lead_coeff_in(const Polynomial& p, std::size_t var) { return p.coefficients_in(var).back(); }

Polynomial pseudo_remainder(const Polynomial& a, const Polynomial& b, std::size_t var) {
    const int db = b.degree_in(var);
    Polynomial lb = lead_coeff_in(b, var);
    Polynomial r = a;
    const auto& reg = a.registry();
    while (!r.is_zero() && r.degree_in(var) >= db) {
        const int dr = r.degree_in(var);
        Polynomial lr = lead_coeff_in(r, var);
        Polynomial shift = lr * Polynomial::variable(reg, var, static_cast<unsigned>(dr - db));
        r = lb * r - shift * b;
    }
    return r;
}

Polynomial prs_gcd(Polynomial pa, Polynomial pb, std::size_t var) {
    if (pa.degree_in(var) < pb.degree_in(var)) std::swap(pa, pb);
    while (true) {
        if (pb.is_zero()) return primitive_in(pa, var);
        if (pb.degree_in(var) == 0) return one_like(pa);
        Polynomial r = pseudo_remainder(pa, pb, var);
        pa = std::move(pb);
        pb = r.is_zero() ? r : primitive_in(r, var);
    }
}

Polynomial gcd_rec(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero()) return b.primitive();
    if (b.is_zero()) return a.primitive();
    if (a.is_constant() || b.is_constant()) return one_like(a);
    if (a.size() == 1 || b.size() == 1) {
        Monomial g = a.leading_term().mono;
        for (const auto& t : a.terms()) g = Monomial::gcd(g, t.mono);
        for (const auto& t : b.terms()) g = Monomial::gcd(g, t.mono);
        return Polynomial::monomial(a.registry(), g, 1);
    }
    if (a == b) return a.primitive();

    auto va = a.variables();
    auto vb = b.variables();
    std::vector<std::size_t> common;
    std::set_intersection(va.begin(), va.end(), vb.begin(), vb.end(), std::back_inserter(common));
    if (common.empty()) return one_like(a);

    if (b.total_degree() <= a.total_degree()) {
        if (exact_divide(a, b)) return b.primitive();
    } else if (exact_divide(b, a)) {
        return a.primitive();
    }
    if (coprime_by_specialization(a, b, common)) return one_like(a);
    {
        std::vector<std::size_t> all;
        std::set_union(va.begin(), va.end(), vb.begin(), vb.end(), std::back_inserter(all));
        if (auto h = heuristic_gcd(a.primitive(), b.primitive(), all)) return h->primitive();
    }

    std::size_t var = common.front();
    int best = std::max(a.degree_in(var), b.degree_in(var));
    for (std::size_t v : common) {
        int d = std::max(a.degree_in(v), b.degree_in(v));
        if (d < best) {
            best = d;
            var = v;
        }
    }
    Polynomial ca = content_in(a, var);
    Polynomial cb = content_in(b, var);
    Polynomial pa = ca.is_constant() ? a : exact_divide(a, ca).value();
    Polynomial pb = cb.is_constant() ? b : exact_divide(b, cb).value();
    Polynomial c = gcd_rec(ca, cb);
    Polynomial g = prs_gcd(std::move(pa), std::move(pb), var);
    return (c * g).primitive();
}

} // namespace

Polynomial gcd(const Polynomial& a, const Polynomial& b) {
    if (!same_ring(a.registry(), b.registry())) throw std::invalid_argument("gcd: polynomials over different registries");
    return gcd_rec(a, b).primitive();
}

} // namespace raccess
