#pragma once

// Buchberger's algorithm over a coefficient field C (Rational, or
// RationalFunction over a parameter-only registry).

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "raccess/errors.hpp"
#include "raccess/groebner.hpp"

namespace raccess::gb {

struct Ring {
    enum class Kind { grevlex, lex, block };

    std::size_t nvars = 0;
    Kind kind = Kind::grevlex;
    std::vector<std::size_t> perm;  // perm[r]: variable at rank r
    std::size_t block = 0;          // Kind::block: ranks [0, block) are eliminated first

    static Ring grevlex(std::size_t n);
    static Ring lex(std::size_t n);
    static Ring from_order(const MonomialOrder& order, std::size_t n);

    int compare(const Monomial& a, const Monomial& b) const;
    bool greater(const Monomial& a, const Monomial& b) const { return compare(a, b) > 0; }

private:
    int grevlex_range(const Monomial& a, const Monomial& b, std::size_t from, std::size_t to) const;
};

template <class C>
struct GTerm {
    Monomial mono;
    C coeff;
};

template <class C>
using GPoly = std::vector<GTerm<C>>;

inline bool coef_is_zero(const Rational& c) { return c == 0; }
inline bool coef_is_zero(const RationalFunction& c) { return c.is_zero(); }
inline bool coef_is_one(const Rational& c) { return c == 1; }
inline bool coef_is_one(const RationalFunction& c) { return c.is_constant() && c.num().constant_term() == 1; }
/// Constant of the same field as `like`.
inline Rational coef_constant(const Rational&, int v) { return Rational(v); }
inline RationalFunction coef_constant(const RationalFunction& like, int v) {
    return RationalFunction::constant(like.registry(), v);
}

/// Parameter polynomials assumed nonzero during a run, deduplicated.
class ConditionSink {
public:
    void note(const Rational&) {}
    void note(const RationalFunction& c);
    void note_polynomial(const Polynomial& p);
    const std::vector<Polynomial>& conditions() const { return list_; }

private:
    std::set<std::string> seen_;
    std::vector<Polynomial> list_;
};

template <class C>
void sort_terms(GPoly<C>& p, const Ring& ring) {
    std::sort(p.begin(), p.end(), [&](const GTerm<C>& a, const GTerm<C>& b) { return ring.greater(a.mono, b.mono); });
}

/// h[pos..] - c * m * g.
template <class C>
GPoly<C> sub_scaled(const GPoly<C>& h, std::size_t pos, const C& c, const Monomial& m, const GPoly<C>& g,
                    const Ring& ring) {
    GPoly<C> out;
    out.reserve(h.size() - pos + g.size());
    std::size_t i = pos, j = 0;
    while (i < h.size() || j < g.size()) {
        if (j == g.size()) {
            out.push_back(h[i++]);
            continue;
        }
        Monomial mg = g[j].mono * m;
        if (i == h.size()) {
            out.push_back({std::move(mg), C(-(c * g[j].coeff))});
            ++j;
            continue;
        }
        int cmp = ring.compare(h[i].mono, mg);
        if (cmp > 0) {
            out.push_back(h[i++]);
        } else if (cmp < 0) {
            out.push_back({std::move(mg), C(-(c * g[j].coeff))});
            ++j;
        } else {
            C v = h[i].coeff - c * g[j].coeff;
            if (!coef_is_zero(v)) out.push_back({std::move(mg), std::move(v)});
            ++i;
            ++j;
        }
    }
    return out;
}

template <class C>
GPoly<C> times_monomial(const GPoly<C>& g, const Monomial& m) {
    GPoly<C> out;
    out.reserve(g.size());
    for (const auto& t : g) out.push_back({t.mono * m, t.coeff});
    return out;
}

template <class C>
void make_monic(GPoly<C>& p, ConditionSink& sink) {
    if (p.empty() || coef_is_one(p.front().coeff)) return;
    C lc = p.front().coeff;
    sink.note(lc);
    for (auto& t : p) t.coeff = C(t.coeff / lc);
}

struct BasisEntry {
    unsigned sugar = 0;
    bool active = true;
};

/// Full reduction by the monic polynomials in `basis` (only indices with active set).
/// `sugar` is raised as reductions multiply basis elements.
template <class C>
GPoly<C> reduce(GPoly<C> h, const std::vector<GPoly<C>>& basis, const std::vector<BasisEntry>& info,
                const Ring& ring, unsigned* sugar = nullptr, bool tail = true) {
    GPoly<C> done;
    std::size_t pos = 0;
    while (pos < h.size()) {
        const Monomial& lm = h[pos].mono;
        std::size_t hit = basis.size();
        for (std::size_t k = 0; k < basis.size(); ++k) {
            if (!info[k].active) continue;
            if (basis[k].front().mono.divides(lm)) {
                hit = k;
                break;
            }
        }
        if (hit == basis.size()) {
            if (!tail) break;
            done.push_back(std::move(h[pos]));
            ++pos;
            continue;
        }
        Monomial q = lm.quotient(basis[hit].front().mono);
        if (sugar) *sugar = std::max(*sugar, q.degree + info[hit].sugar);
        C c = h[pos].coeff;
        h = sub_scaled(h, pos, c, q, basis[hit], ring);
        pos = 0;
    }
    if (!tail) {
        done.insert(done.end(), std::make_move_iterator(h.begin() + static_cast<std::ptrdiff_t>(pos)),
                    std::make_move_iterator(h.end()));
        return done;
    }
    return done;
}

template <class C>
struct GbRun {
    std::vector<GPoly<C>> basis;  // reduced, monic, increasing leading monomials
    std::vector<Polynomial> conditions;
    std::size_t pairs_processed = 0;
};

template <class C>
class Buchberger {
public:
    Buchberger(const Ring& ring, const GbOptions& options) : ring_(ring), options_(options) {
        if (!options_.selector) options_.selector = std::make_shared<SugarSelector>();
        cmp_ = [this](const Monomial& a, const Monomial& b) { return ring_.compare(a, b); };
    }

    ConditionSink& sink() { return sink_; }

    GbRun<C> run(std::vector<GPoly<C>> inputs) {
        for (auto& f : inputs) sort_terms(f, ring_);
        std::stable_sort(inputs.begin(), inputs.end(), [&](const GPoly<C>& a, const GPoly<C>& b) {
            if (a.empty() || b.empty()) return !a.empty() && b.empty();
            return ring_.compare(a.front().mono, b.front().mono) < 0;
        });
        for (auto& f : inputs) {
            if (f.empty()) continue;
            unsigned sugar = max_degree(f);
            GPoly<C> h = reduce(std::move(f), basis_, info_, ring_, &sugar);
            if (h.empty()) continue;
            if (insert(std::move(h), sugar)) return finish();
        }
        while (!pairs_.empty()) {
            if (processed_ >= options_.max_pairs)
                throw ResourceError("Groebner basis: pair budget exhausted", basis_.size(), processed_);
            std::size_t pick = options_.selector->select(pairs_, cmp_);
            CriticalPair p = pairs_[pick];
            pairs_.erase(pairs_.begin() + static_cast<std::ptrdiff_t>(pick));
            ++processed_;
            if (p.sugar > options_.max_degree)
                throw ResourceError("Groebner basis: degree budget " + std::to_string(options_.max_degree) +
                                        " exceeded",
                                    basis_.size(), processed_);
            GPoly<C> s = spoly(p);
            unsigned sugar = p.sugar;
            GPoly<C> h = reduce(std::move(s), basis_, info_, ring_, &sugar);
            if (h.empty()) continue;
            if (insert(std::move(h), sugar)) return finish();
        }
        return finish();
    }

private:
    static unsigned max_degree(const GPoly<C>& f) {
        unsigned d = 0;
        for (const auto& t : f) d = std::max<unsigned>(d, t.mono.degree);
        return d;
    }

    GPoly<C> spoly(const CriticalPair& p) const {
        const GPoly<C>& f = basis_[p.i];
        const GPoly<C>& g = basis_[p.j];
        GPoly<C> a = times_monomial(f, p.lcm.quotient(f.front().mono));
        return sub_scaled(a, 0, coef_constant(g.front().coeff, 1), p.lcm.quotient(g.front().mono), g, ring_);
    }

    // Returns true when the ideal became the unit ideal.
    bool insert(GPoly<C> h, unsigned sugar) {
        make_monic(h, sink_);
        if (h.front().mono.is_one()) {
            basis_.assign(1, std::move(h));
            info_.assign(1, BasisEntry{0, true});
            pairs_.clear();
            unit_ = true;
            return true;
        }
        if (h.front().mono.degree > options_.max_degree)
            throw ResourceError("Groebner basis: degree budget " + std::to_string(options_.max_degree) + " exceeded",
                                basis_.size(), processed_);
        const std::size_t t = basis_.size();
        const Monomial lt = h.front().mono;
        basis_.push_back(std::move(h));
        info_.push_back(BasisEntry{sugar, true});
        update(t, lt);
        return false;
    }

    CriticalPair make_pair(std::size_t i, std::size_t t) const {
        const Monomial& li = basis_[i].front().mono;
        const Monomial& lt = basis_[t].front().mono;
        CriticalPair p;
        p.i = i;
        p.j = t;
        p.lcm = Monomial::lcm(li, lt);
        p.sugar = std::max(info_[i].sugar + (p.lcm.degree - li.degree), info_[t].sugar + (p.lcm.degree - lt.degree));
        return p;
    }

    // Gebauer-Moeller installation of the new element t.
    void update(std::size_t t, const Monomial& lt) {
        std::vector<CriticalPair> fresh;
        for (std::size_t i = 0; i < t; ++i)
            if (info_[i].active) fresh.push_back(make_pair(i, t));

        // Drop pairs whose lcm is strictly divisible by another new lcm.
        std::vector<bool> keep(fresh.size(), true);
        for (std::size_t a = 0; a < fresh.size(); ++a) {
            for (std::size_t b = 0; b < fresh.size(); ++b) {
                if (a == b || !keep[b]) continue;
                if (fresh[b].lcm.divides(fresh[a].lcm) && !(fresh[b].lcm == fresh[a].lcm)) {
                    keep[a] = false;
                    break;
                }
            }
        }
        // Among equal lcms keep one, or none if any of them is coprime.
        std::vector<CriticalPair> kept;
        std::vector<bool> seen(fresh.size(), false);
        for (std::size_t a = 0; a < fresh.size(); ++a) {
            if (!keep[a] || seen[a]) continue;
            bool coprime = false;
            for (std::size_t b = a; b < fresh.size(); ++b) {
                if (!keep[b] || !(fresh[b].lcm == fresh[a].lcm)) continue;
                seen[b] = true;
                const Monomial& lb = basis_[fresh[b].i].front().mono;
                if (Monomial::gcd(lb, lt).is_one()) coprime = true;
            }
            if (!coprime) kept.push_back(fresh[a]);
        }
        // Old pairs made redundant by t.
        std::vector<CriticalPair> old;
        old.reserve(pairs_.size());
        for (auto& p : pairs_) {
            if (lt.divides(p.lcm)) {
                Monomial l1 = Monomial::lcm(basis_[p.i].front().mono, lt);
                Monomial l2 = Monomial::lcm(basis_[p.j].front().mono, lt);
                if (!(l1 == p.lcm) && !(l2 == p.lcm)) continue;
            }
            old.push_back(std::move(p));
        }
        pairs_ = std::move(old);
        for (auto& p : kept) pairs_.push_back(std::move(p));
        for (std::size_t i = 0; i < t; ++i)
            if (info_[i].active && lt.divides(basis_[i].front().mono)) info_[i].active = false;
    }

    GbRun<C> finish() {
        GbRun<C> out;
        out.pairs_processed = processed_;
        std::vector<GPoly<C>> live;
        for (std::size_t i = 0; i < basis_.size(); ++i)
            if (info_[i].active) live.push_back(basis_[i]);
        std::sort(live.begin(), live.end(),
                  [&](const GPoly<C>& a, const GPoly<C>& b) { return ring_.compare(a.front().mono, b.front().mono) < 0; });
        // Inter-reduce tails; leading monomials are already minimal.
        std::vector<BasisEntry> all(live.size());
        for (std::size_t k = 0; k < live.size(); ++k) {
            all.assign(live.size(), BasisEntry{0, true});
            all[k].active = false;
            GPoly<C> head{live[k].front()};
            GPoly<C> tail(live[k].begin() + 1, live[k].end());
            GPoly<C> r = reduce(std::move(tail), live, all, ring_);
            head.insert(head.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
            live[k] = std::move(head);
        }
        out.basis = std::move(live);
        out.conditions = sink_.conditions();
        return out;
    }

    Ring ring_;
    GbOptions options_;
    MonomialCompare cmp_;
    ConditionSink sink_;
    std::vector<GPoly<C>> basis_;
    std::vector<BasisEntry> info_;
    std::vector<CriticalPair> pairs_;
    std::size_t processed_ = 0;
    bool unit_ = false;
};

} // namespace raccess::gb
