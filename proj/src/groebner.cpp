#include "raccess/groebner.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <type_traits>

#include "gb_engine.hpp"
#include "raccess/univariate.hpp"

namespace raccess {

// ---------------------------------------------------------------------------
// Orders, selectors, options

MonomialOrder MonomialOrder::degrevlex(std::size_t n) {
    MonomialOrder o;
    o.kind = Kind::degrevlex;
    o.perm.resize(n);
    std::iota(o.perm.begin(), o.perm.end(), 0);
    return o;
}

MonomialOrder MonomialOrder::lex(std::size_t n) {
    MonomialOrder o = degrevlex(n);
    o.kind = Kind::lex;
    return o;
}

std::string MonomialOrder::key() const {
    std::string k = kind == Kind::lex ? "lex" : "grevlex";
    for (auto p : perm) k += ":" + std::to_string(p);
    return k;
}

std::size_t SugarSelector::select(const std::vector<CriticalPair>& pairs, const MonomialCompare& cmp) const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < pairs.size(); ++k) {
        const auto& a = pairs[k];
        const auto& b = pairs[best];
        if (a.sugar != b.sugar) {
            if (a.sugar < b.sugar) best = k;
            continue;
        }
        int c = cmp(a.lcm, b.lcm);
        if (c < 0 || (c == 0 && std::tie(a.j, a.i) < std::tie(b.j, b.i))) best = k;
    }
    return best;
}

std::size_t NormalSelector::select(const std::vector<CriticalPair>& pairs, const MonomialCompare& cmp) const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < pairs.size(); ++k) {
        int c = cmp(pairs[k].lcm, pairs[best].lcm);
        if (c < 0 || (c == 0 && std::tie(pairs[k].j, pairs[k].i) < std::tie(pairs[best].j, pairs[best].i))) best = k;
    }
    return best;
}

GbOptions GbOptions::defaults() {
    GbOptions o;
    if (const char* env = std::getenv("RACCESS_GB_MAX_DEGREE")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) o.max_degree = static_cast<unsigned>(v);
    }
    o.selector = std::make_shared<SugarSelector>();
    return o;
}

namespace gb {

Ring Ring::grevlex(std::size_t n) {
    Ring r;
    r.nvars = n;
    r.kind = Kind::grevlex;
    r.perm.resize(n);
    std::iota(r.perm.begin(), r.perm.end(), 0);
    return r;
}

Ring Ring::lex(std::size_t n) {
    Ring r = grevlex(n);
    r.kind = Kind::lex;
    return r;
}

Ring Ring::from_order(const MonomialOrder& order, std::size_t n) {
    Ring r = order.kind == MonomialOrder::Kind::lex ? lex(n) : grevlex(n);
    if (!order.perm.empty()) {
        std::vector<std::size_t> sorted = order.perm;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i)
            if (sorted[i] != i || sorted.size() != n)
                throw std::invalid_argument("MonomialOrder: permutation is not a bijection on the states");
        r.perm = order.perm;
    }
    return r;
}

int Ring::grevlex_range(const Monomial& a, const Monomial& b, std::size_t from, std::size_t to) const {
    unsigned da = 0, db = 0;
    for (std::size_t r = from; r < to; ++r) {
        da += a.exp[perm[r]];
        db += b.exp[perm[r]];
    }
    if (da != db) return da > db ? 1 : -1;
    for (std::size_t r = to; r-- > from;) {
        std::size_t v = perm[r];
        if (a.exp[v] != b.exp[v]) return a.exp[v] < b.exp[v] ? 1 : -1;
    }
    return 0;
}

int Ring::compare(const Monomial& a, const Monomial& b) const {
    switch (kind) {
    case Kind::grevlex:
        if (a.degree != b.degree) return a.degree > b.degree ? 1 : -1;
        for (std::size_t r = nvars; r-- > 0;) {
            std::size_t v = perm[r];
            if (a.exp[v] != b.exp[v]) return a.exp[v] < b.exp[v] ? 1 : -1;
        }
        return 0;
    case Kind::lex:
        for (std::size_t r = 0; r < nvars; ++r) {
            std::size_t v = perm[r];
            if (a.exp[v] != b.exp[v]) return a.exp[v] > b.exp[v] ? 1 : -1;
        }
        return 0;
    case Kind::block:
        if (int c = grevlex_range(a, b, 0, block)) return c;
        return grevlex_range(a, b, block, nvars);
    }
    return 0;
}

void ConditionSink::note(const RationalFunction& c) {
    note_polynomial(c.num());
    note_polynomial(c.den());
}

void ConditionSink::note_polynomial(const Polynomial& p) {
    if (p.is_zero() || p.is_constant()) return;
    Polynomial q = square_free_part(p);
    if (seen_.insert(q.to_string()).second) list_.push_back(std::move(q));
}

} // namespace gb

// ---------------------------------------------------------------------------
// Conversions between registry polynomials and ring polynomials

namespace {

using gb::GPoly;
using gb::Ring;
using PF = RationalFunction;

struct Ctx {
    RegistryPtr reg;
    RegistryPtr preg;  // parameters only
    std::size_t n = 0;
    std::size_t arity = 0;  // ring variables: the states, plus auxiliaries
};

Ctx make_ctx(const RegistryPtr& reg, std::size_t extra = 0) {
    Ctx c;
    c.reg = reg;
    c.preg = VariableRegistry::create(reg->param_names(), {}, {}, 0);
    c.n = reg->n();
    c.arity = c.n + extra;
    return c;
}

Monomial ring_mono(const Monomial& full, const Ctx& ctx) {
    Monomial m(ctx.arity);
    for (std::size_t i = 0; i < ctx.n; ++i) {
        m.exp[i] = full.exp[ctx.reg->state_var(i)];
        m.degree += m.exp[i];
    }
    return m;
}

Monomial full_mono(const Monomial& ring, const Ctx& ctx) {
    Monomial m(ctx.reg->size());
    for (std::size_t i = 0; i < ctx.n; ++i) {
        m.exp[ctx.reg->state_var(i)] = ring.exp[i];
        m.degree += ring.exp[i];
    }
    for (std::size_t i = ctx.n; i < ring.exp.size(); ++i)
        if (ring.exp[i] != 0) throw std::logic_error("ring polynomial still uses an auxiliary variable");
    return m;
}

void check_generator(const Polynomial& p) {
    if (p.uses_class(VarClass::input))
        throw std::invalid_argument("ideal generator uses input variables: " + p.to_string());
}

void convert(const Polynomial& p, const Ctx& ctx, gb::ConditionSink&, GPoly<Rational>& out) {
    out.clear();
    for (const auto& t : p.terms()) {
        for (std::size_t i = 0; i < ctx.reg->num_params(); ++i)
            if (t.mono.exp[ctx.reg->param_var(i)] != 0)
                throw std::logic_error("rational-field conversion of a parametric polynomial");
        out.push_back({ring_mono(t.mono, ctx), t.coeff});
    }
}

void convert(const Polynomial& p, const Ctx& ctx, gb::ConditionSink& sink, GPoly<PF>& out) {
    out.clear();
    std::map<std::vector<std::uint16_t>, std::pair<Monomial, std::vector<Term>>> groups;
    const std::size_t np = ctx.reg->num_params();
    for (const auto& t : p.terms()) {
        Monomial rm = ring_mono(t.mono, ctx);
        Monomial pm(np);
        for (std::size_t i = 0; i < np; ++i) {
            pm.exp[i] = t.mono.exp[ctx.reg->param_var(i)];
            pm.degree += pm.exp[i];
        }
        auto& slot = groups[rm.exp];
        slot.first = rm;
        slot.second.push_back({std::move(pm), t.coeff});
    }
    std::vector<Polynomial> coeffs;
    Polynomial content(ctx.preg);
    for (auto& [key, g] : groups) {
        coeffs.push_back(Polynomial::from_terms(ctx.preg, std::move(g.second)));
        content = content.is_zero() ? coeffs.back().primitive() : gcd(content, coeffs.back());
    }
    if (!content.is_zero() && !content.is_constant()) sink.note_polynomial(content);
    std::size_t k = 0;
    for (auto& [key, g] : groups) {
        Polynomial c = content.is_zero() || content.is_constant() ? coeffs[k] : exact_divide(coeffs[k], content).value();
        out.push_back({g.first, PF(std::move(c))});
        ++k;
    }
}

Polynomial back(const GPoly<Rational>& g, const Ctx& ctx) {
    std::vector<Term> terms;
    for (const auto& t : g) terms.push_back({full_mono(t.mono, ctx), t.coeff});
    return Polynomial::from_terms(ctx.reg, std::move(terms)).primitive();
}

Polynomial back(const GPoly<PF>& g, const Ctx& ctx) {
    Polynomial l = Polynomial::constant(ctx.preg, 1);
    for (const auto& t : g) {
        const Polynomial& d = t.coeff.den();
        if (d.is_constant()) continue;
        l = l * exact_divide(d, gcd(l, d)).value();
    }
    std::vector<Polynomial> cs;
    Polynomial content(ctx.preg);
    for (const auto& t : g) {
        cs.push_back(t.coeff.num() * exact_divide(l, t.coeff.den()).value());
        content = content.is_zero() ? cs.back().primitive() : gcd(content, cs.back());
    }
    Polynomial out(ctx.reg);
    for (std::size_t k = 0; k < g.size(); ++k) {
        Polynomial c = content.is_constant() ? cs[k] : exact_divide(cs[k], content).value();
        out += c.embed(ctx.reg).times_monomial(full_mono(g[k].mono, ctx), 1);
    }
    return out.primitive();
}

} // namespace

// ---------------------------------------------------------------------------
// Ideal

namespace {

struct Entry {
    Ring ring;
    std::vector<Polynomial> basis;
    std::vector<Polynomial> conditions;
    std::vector<Monomial> lms;
};

template <class C>
Entry compute_entry(const Ctx& ctx, const std::vector<Polynomial>& gens, const Ring& ring, const GbOptions& options) {
    gb::Buchberger<C> engine(ring, options);
    std::vector<GPoly<C>> inputs;
    for (const auto& g : gens) {
        GPoly<C> q;
        convert(g, ctx, engine.sink(), q);
        inputs.push_back(std::move(q));
    }
    auto run = engine.run(std::move(inputs));
    Entry e;
    e.ring = ring;
    for (const auto& b : run.basis) {
        e.basis.push_back(back(b, ctx));
        e.lms.push_back(b.front().mono);
    }
    for (const auto& c : run.conditions) e.conditions.push_back(c.embed(ctx.reg));
    return e;
}

bool any_uses_params(const std::vector<Polynomial>& ps) {
    for (const auto& p : ps)
        if (p.uses_class(VarClass::parameter)) return true;
    return false;
}

Entry compute(const RegistryPtr& reg, const std::vector<Polynomial>& gens, const Ring& ring, const GbOptions& options) {
    Ctx ctx = make_ctx(reg);
    if (any_uses_params(gens)) return compute_entry<PF>(ctx, gens, ring, options);
    return compute_entry<Rational>(ctx, gens, ring, options);
}

} // namespace

struct Ideal::Cache {
    std::mutex mutex;
    std::map<std::string, std::shared_ptr<const Entry>> entries;
};

namespace {

std::shared_ptr<const Entry> entry_for(const Ideal& ideal, Ideal::Cache& cache, const MonomialOrder& order) {
    std::string key = order.key();
    std::lock_guard<std::mutex> lock(cache.mutex);
    auto it = cache.entries.find(key);
    if (it != cache.entries.end()) return it->second;
    Ring ring = Ring::from_order(order, ideal.registry()->n());
    auto e = std::make_shared<const Entry>(compute(ideal.registry(), ideal.generators(), ring, GbOptions::defaults()));
    cache.entries.emplace(key, e);
    return e;
}

} // namespace

struct IdealAccess {
    static const Entry& entry(const Ideal& ideal, const MonomialOrder& order) {
        return *entry_for(ideal, *ideal.cache_, order);
    }
    static const Entry& entry(const Ideal& ideal) { return entry(ideal, MonomialOrder::degrevlex(ideal.registry()->n())); }
};

Ideal::Ideal(RegistryPtr reg, std::vector<Polynomial> generators, Certification cert)
    : reg_(std::move(reg)), cert_(cert), cache_(std::make_shared<Cache>()) {
    if (!reg_) throw std::invalid_argument("Ideal: null registry");
    for (auto& g : generators) {
        if (g.is_zero()) continue;
        check_generator(g);
        gens_.push_back(g.registry() == reg_ ? std::move(g) : g.embed(reg_));
    }
}

Ideal Ideal::zero(RegistryPtr reg) { return Ideal(std::move(reg), {}); }

Ideal Ideal::unit(RegistryPtr reg) {
    Polynomial one = Polynomial::constant(reg, 1);
    return Ideal(std::move(reg), {one});
}

Ideal Ideal::with_certification(Certification cert) const {
    Ideal copy = *this;
    copy.cert_ = cert;
    return copy;
}

const std::vector<Polynomial>& Ideal::basis(const MonomialOrder& order) const {
    return IdealAccess::entry(*this, order).basis;
}

const std::vector<Polynomial>& Ideal::basis() const { return basis(MonomialOrder::degrevlex(reg_->n())); }

const std::vector<Polynomial>& Ideal::parameter_conditions() const { return IdealAccess::entry(*this).conditions; }

bool Ideal::is_zero() const { return gens_.empty(); }

bool Ideal::is_unit() const {
    const auto& b = basis();
    return b.size() == 1 && b[0].is_constant();
}

bool Ideal::uses_parameters() const { return any_uses_params(gens_); }

std::vector<Polynomial> groebner_basis(const Ideal& ideal, const MonomialOrder& order) { return ideal.basis(order); }

std::vector<Polynomial> groebner_basis(const Ideal& ideal, const MonomialOrder& order, const GbOptions& options) {
    Ring ring = Ring::from_order(order, ideal.registry()->n());
    return compute(ideal.registry(), ideal.generators(), ring, options).basis;
}


// ---------------------------------------------------------------------------
// Membership, equality, sums, intersections

namespace {

template <class C>
std::vector<GPoly<C>> monic_basis(const Entry& e, const Ctx& ctx) {
    gb::ConditionSink sink;
    std::vector<GPoly<C>> out;
    for (const auto& b : e.basis) {
        GPoly<C> q;
        convert(b, ctx, sink, q);
        gb::sort_terms(q, e.ring);
        gb::make_monic(q, sink);
        out.push_back(std::move(q));
    }
    return out;
}

template <class C>
Polynomial normal_form_in(const Entry& e, const Ctx& ctx, const Polynomial& p) {
    auto basis = monic_basis<C>(e, ctx);
    std::vector<gb::BasisEntry> info(basis.size());
    gb::ConditionSink sink;
    GPoly<C> h;
    convert(p, ctx, sink, h);
    gb::sort_terms(h, e.ring);
    GPoly<C> r = gb::reduce(std::move(h), basis, info, e.ring);
    if (r.empty()) return Polynomial(ctx.reg);
    return back(r, ctx);
}

} // namespace

Polynomial normal_form(const Ideal& ideal, const Polynomial& p) {
    check_generator(p);
    Polynomial q = same_ring(p.registry(), ideal.registry()) ? p : p.embed(ideal.registry());
    if (q.is_zero()) return q;
    const Entry& e = IdealAccess::entry(ideal);
    Ctx ctx = make_ctx(ideal.registry());
    if (ideal.uses_parameters() || q.uses_class(VarClass::parameter)) return normal_form_in<PF>(e, ctx, q);
    return normal_form_in<Rational>(e, ctx, q);
}

bool contains(const Ideal& ideal, const Polynomial& p) { return normal_form(ideal, p).is_zero(); }

bool contains(const Ideal& ideal, const Ideal& sub) {
    for (const auto& g : sub.generators())
        if (!contains(ideal, g)) return false;
    return true;
}

bool ideal_equal(const Ideal& a, const Ideal& b) {
    if (!a.registry()->same_as(*b.registry())) {
        if (a.registry()->n() != b.registry()->n()) return false;
        Ideal bb(a.registry(), b.generators());
        return ideal_equal(a, bb);
    }
    const auto& ba = a.basis();
    const auto& bb = b.basis();
    if (ba.size() != bb.size()) return false;
    for (std::size_t i = 0; i < ba.size(); ++i)
        if (ba[i] != bb[i]) return false;
    return true;
}

namespace {

Certification weakest(Certification a, Certification b) {
    return a == Certification::exact && b == Certification::exact ? Certification::exact : Certification::heuristic;
}

} // namespace

Ideal ideal_sum(const Ideal& a, const Ideal& b) {
    std::vector<Polynomial> gens;
    for (const auto& g : a.generators()) gens.push_back(g);
    for (const auto& g : b.generators()) gens.push_back(g.embed(a.registry()));
    Ideal raw(a.registry(), std::move(gens));
    return Ideal(a.registry(), raw.basis(), weakest(a.certification(), b.certification()));
}

namespace {

// (t*a + (1-t)*b) eliminated by a block order with t ranked first.
template <class C>
std::vector<Polynomial> intersect_in(const Ideal& a, const Ideal& b) {
    Ctx ctx = make_ctx(a.registry(), 1);
    const std::size_t t = ctx.n;
    Ring ring;
    ring.nvars = ctx.n + 1;
    ring.kind = Ring::Kind::block;
    ring.block = 1;
    ring.perm.push_back(t);
    for (std::size_t i = 0; i < ctx.n; ++i) ring.perm.push_back(i);
    Monomial tm(ctx.n + 1);
    tm.exp[t] = 1;
    tm.degree = 1;

    gb::Buchberger<C> engine(ring, GbOptions::defaults());
    std::vector<GPoly<C>> inputs;
    for (const auto& f : a.generators()) {
        GPoly<C> q;
        convert(f, ctx, engine.sink(), q);
        inputs.push_back(gb::times_monomial(q, tm));
    }
    for (const auto& g : b.generators()) {
        GPoly<C> q;
        convert(g.embed(a.registry()), ctx, engine.sink(), q);
        GPoly<C> r = q;
        for (const auto& term : q) r.push_back({term.mono * tm, C(-term.coeff)});
        inputs.push_back(std::move(r));
    }
    auto run = engine.run(std::move(inputs));
    std::vector<Polynomial> out;
    for (const auto& p : run.basis) {
        bool free_of_t = true;
        for (const auto& term : p)
            if (term.mono.exp[t] != 0) free_of_t = false;
        if (free_of_t) out.push_back(back(p, ctx));
    }
    return out;
}

} // namespace

Ideal intersect(const Ideal& a, const Ideal& b) {
    Certification cert = weakest(a.certification(), b.certification());
    if (a.is_zero() || b.is_zero()) return Ideal::zero(a.registry()).with_certification(cert);
    if (a.is_unit()) return Ideal(a.registry(), b.basis(), cert);
    if (b.is_unit()) return Ideal(a.registry(), a.basis(), cert);
    std::vector<Polynomial> gens = a.uses_parameters() || b.uses_parameters() ? intersect_in<PF>(a, b)
                                                                              : intersect_in<Rational>(a, b);
    return Ideal(a.registry(), std::move(gens), cert);
}

// ---------------------------------------------------------------------------
// Dimension and quotient structure

namespace {

// Standard monomials of a zero-dimensional ideal, or nullopt.
std::optional<std::vector<Monomial>> standard_monomials(const Entry& e, std::size_t n) {
    if (e.lms.empty()) return n == 0 ? std::optional<std::vector<Monomial>>(std::vector<Monomial>{Monomial(0)})
                                     : std::nullopt;
    if (e.lms.size() == 1 && e.lms[0].is_one()) return std::vector<Monomial>{};
    std::vector<unsigned> bound(n, 0);
    for (const auto& lm : e.lms) {
        std::size_t used = 0, var = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (lm.exp[i] != 0) {
                ++used;
                var = i;
            }
        if (used == 1 && (bound[var] == 0 || lm.exp[var] < bound[var])) bound[var] = lm.exp[var];
    }
    std::size_t total = 1;
    for (auto b : bound) {
        if (b == 0) return std::nullopt;
        total *= b;
        if (total > 2000000) throw ResourceError("quotient ring too large to enumerate", e.basis.size(), 0);
    }
    std::vector<Monomial> out;
    Monomial m(n);
    while (true) {
        bool standard = true;
        for (const auto& lm : e.lms)
            if (lm.divides(m)) {
                standard = false;
                break;
            }
        if (standard) out.push_back(m);
        std::size_t i = 0;
        while (i < n) {
            if (m.exp[i] + 1u < bound[i]) {
                ++m.exp[i];
                ++m.degree;
                break;
            }
            m.degree -= m.exp[i];
            m.exp[i] = 0;
            ++i;
        }
        if (i == n) break;
    }
    Ring ring = e.ring;
    std::sort(out.begin(), out.end(), [&](const Monomial& a, const Monomial& b) { return ring.compare(a, b) < 0; });
    return out;
}

} // namespace

bool Ideal::is_zero_dimensional() const { return quotient_dimension().has_value(); }

std::optional<std::size_t> Ideal::quotient_dimension() const {
    auto sm = standard_monomials(IdealAccess::entry(*this), reg_->n());
    if (!sm) return std::nullopt;
    return sm->size();
}

std::string Ideal::to_string() const {
    std::ostringstream os;
    os << "<";
    const auto& b = basis();
    for (std::size_t i = 0; i < b.size(); ++i) os << (i ? ", " : "") << b[i].to_string();
    os << ">";
    return os.str();
}

// ---------------------------------------------------------------------------
// Zero-dimensional radical (Seidenberg) and real solving

namespace {

template <class C>
struct EchelonRow {
    std::size_t pivot;
    std::vector<C> v, combo;
};

template <class C>
std::vector<Polynomial> minimal_polynomials(const Entry& e, const Ctx& ctx, const std::vector<Monomial>& standard) {
    auto basis = monic_basis<C>(e, ctx);
    std::vector<gb::BasisEntry> info(basis.size());
    std::map<std::vector<std::uint16_t>, std::size_t> index;
    for (std::size_t k = 0; k < standard.size(); ++k) index[standard[k].exp] = k;
    const std::size_t d = standard.size();
    const C zero = gb::coef_constant(basis.front().front().coeff, 0);
    const C one = gb::coef_constant(basis.front().front().coeff, 1);

    auto coordinates = [&](const GPoly<C>& r) {
        std::vector<C> v(d, zero);
        for (const auto& t : r) v[index.at(t.mono.exp)] = t.coeff;
        return v;
    };

    std::vector<Polynomial> out;
    for (std::size_t var = 0; var < ctx.n; ++var) {
        Monomial xv(ctx.arity);
        xv.exp[var] = 1;
        xv.degree = 1;
        std::vector<EchelonRow<C>> rows;
        GPoly<C> cur{{Monomial(ctx.arity), one}};
        cur = gb::reduce(std::move(cur), basis, info, e.ring);
        for (std::size_t k = 0; k <= d; ++k) {
            std::vector<C> v = coordinates(cur);
            std::vector<C> combo(d + 1, zero);
            combo[k] = one;
            for (const auto& row : rows) {
                if (gb::coef_is_zero(v[row.pivot])) continue;
                C f = v[row.pivot];
                for (std::size_t c = 0; c < d; ++c)
                    if (!gb::coef_is_zero(row.v[c])) v[c] = C(v[c] - f * row.v[c]);
                for (std::size_t c = 0; c <= d; ++c)
                    if (!gb::coef_is_zero(row.combo[c])) combo[c] = C(combo[c] - f * row.combo[c]);
            }
            std::size_t pivot = d;
            for (std::size_t c = 0; c < d; ++c)
                if (!gb::coef_is_zero(v[c])) {
                    pivot = c;
                    break;
                }
            if (pivot == d) {
                GPoly<C> mp;
                for (std::size_t j = k + 1; j-- > 0;) {
                    if (gb::coef_is_zero(combo[j])) continue;
                    Monomial m(ctx.arity);
                    m.exp[var] = static_cast<std::uint16_t>(j);
                    m.degree = static_cast<std::uint32_t>(j);
                    mp.push_back({m, combo[j]});
                }
                out.push_back(back(mp, ctx));
                break;
            }
            C inv = C(one / v[pivot]);
            for (auto& x : v) x = C(x * inv);
            for (auto& x : combo) x = C(x * inv);
            rows.push_back({pivot, std::move(v), std::move(combo)});
            cur = gb::reduce(gb::times_monomial(cur, xv), basis, info, e.ring);
        }
    }
    return out;
}

} // namespace

Ideal zero_dim_radical(const Ideal& ideal) {
    const Entry& e = IdealAccess::entry(ideal);
    auto standard = standard_monomials(e, ideal.registry()->n());
    if (!standard) throw std::invalid_argument("zero_dim_radical: ideal is not zero-dimensional");
    if (standard->empty()) return Ideal::unit(ideal.registry());
    Ctx ctx = make_ctx(ideal.registry());
    bool params = any_uses_params(e.basis);
    auto mins = params ? minimal_polynomials<PF>(e, ctx, *standard) : minimal_polynomials<Rational>(e, ctx, *standard);
    std::vector<Polynomial> gens = e.basis;
    for (const auto& p : mins) gens.push_back(square_free_part(p));
    Ideal raw(ideal.registry(), std::move(gens));
    return Ideal(ideal.registry(), raw.basis(), ideal.certification());
}

namespace {

struct Refusal {
    std::string why;
};

UPoly univariate(const Polynomial& p, std::size_t var) {
    std::vector<Rational> c;
    for (const auto& q : p.coefficients_in(var)) c.push_back(q.constant_term());
    return UPoly(std::move(c));
}

bool only_uses(const Polynomial& p, const std::vector<std::size_t>& vars) {
    for (std::size_t v : p.variables())
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) return false;
    return true;
}

void solve_rec(const RegistryPtr& reg, const std::vector<Polynomial>& gens, std::vector<std::size_t> remaining,
               std::vector<RealCoordinate> partial, std::vector<RealPoint>& out) {
    if (remaining.empty()) {
        for (const auto& g : gens)
            if (!g.is_zero()) return;
        out.push_back(partial);
        return;
    }
    MonomialOrder lex;
    lex.kind = MonomialOrder::Kind::lex;
    lex.perm = remaining;
    for (std::size_t i = 0; i < reg->n(); ++i)
        if (std::find(remaining.begin(), remaining.end(), i) == remaining.end()) lex.perm.push_back(i);
    Ideal ideal(reg, gens);
    const auto& basis = ideal.basis(lex);
    if (basis.size() == 1 && basis[0].is_constant()) return;
    const std::size_t last = remaining.back();
    const std::size_t var = reg->state_var(last);
    const Polynomial* uni = nullptr;
    for (const auto& b : basis)
        if (only_uses(b, {var}) && !b.is_constant()) uni = &b;
    if (!uni) throw Refusal{"no univariate polynomial in " + reg->symbol(var).name};
    UPoly u = univariate(*uni, var);
    remaining.pop_back();

    for (const auto& root : isolate_real_roots(u)) {
        if (root.exact) {
            partial[last] = RealCoordinate{true, root.lo, root.lo, root.lo};
            std::vector<Polynomial> sub;
            for (const auto& b : basis) sub.push_back(b.partial_evaluate({{var, root.lo}}));
            solve_rec(reg, sub, remaining, partial, out);
            continue;
        }
        RootInterval fine = refine_root(u, root, Rational(1, Integer(1) << 80));
        partial[last] = RealCoordinate{false, fine.midpoint(), fine.lo, fine.hi};
        // Irrational coordinate: every other remaining variable must be a
        // polynomial in this one (shape position).
        for (std::size_t w : remaining) {
            const std::size_t wv = reg->state_var(w);
            const Polynomial* lin = nullptr;
            for (const auto& b : basis)
                if (b.degree_in(wv) == 1 && only_uses(b, {wv, var}) && b.coefficients_in(wv)[1].is_constant())
                    lin = &b;
            if (!lin) throw Refusal{"irrational root of " + reg->symbol(var).name + " outside shape position"};
            auto cs = lin->coefficients_in(wv);
            UPoly g = univariate(cs[0], var).scaled(-1 / cs[1].constant_term());
            Rational a = g.eval(fine.lo), b = g.eval(fine.hi), mid = g.eval(fine.midpoint());
            if (b < a) std::swap(a, b);
            partial[w] = RealCoordinate{false, mid, a, b};
            // The coordinate may still be rational: look for an exact root of
            // its own eliminant inside the image interval.
            MonomialOrder elim;
            elim.kind = MonomialOrder::Kind::lex;
            for (std::size_t i = 0; i < reg->n(); ++i)
                if (i != w) elim.perm.push_back(i);
            elim.perm.push_back(w);
            for (const auto& e : ideal.basis(elim)) {
                if (!only_uses(e, {wv}) || e.is_constant()) continue;
                for (const auto& r : isolate_real_roots(univariate(e, wv)))
                    if (r.exact && r.lo >= a && r.lo <= b) partial[w] = RealCoordinate{true, r.lo, r.lo, r.lo};
            }
        }
        out.push_back(partial);
    }
}

} // namespace

SolveResult solve_zero_dim(const Ideal& ideal) {
    SolveResult res;
    if (ideal.is_unit()) return res;
    if (!ideal.is_zero_dimensional()) {
        res.status = SolveResult::Status::not_zero_dimensional;
        res.explanation = "the ideal " + ideal.to_string() + " is not zero-dimensional";
        return res;
    }
    if (any_uses_params(ideal.basis())) {
        res.status = SolveResult::Status::refused;
        res.explanation = "solution coordinates depend on parameters: " + ideal.to_string();
        return res;
    }
    Ideal rad = zero_dim_radical(ideal);
    const RegistryPtr& reg = ideal.registry();
    std::vector<std::size_t> order(reg->n());
    std::iota(order.begin(), order.end(), 0);
    try {
        solve_rec(reg, rad.basis(), order, std::vector<RealCoordinate>(reg->n()), res.points);
    } catch (const Refusal& r) {
        res.status = SolveResult::Status::refused;
        res.explanation = r.why;
        res.points.clear();
        return res;
    }
    std::sort(res.points.begin(), res.points.end(), [](const RealPoint& a, const RealPoint& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i].value != b[i].value) return a[i].value < b[i].value;
        }
        return false;
    });
    return res;
}

Ideal vanishing_ideal(const RegistryPtr& reg, const std::vector<std::vector<Rational>>& points) {
    if (points.empty()) return Ideal::unit(reg);
    std::optional<Ideal> acc;
    for (const auto& pt : points) {
        std::vector<Polynomial> gens;
        for (std::size_t i = 0; i < reg->n(); ++i)
            gens.push_back(Polynomial::variable(reg, reg->state_var(i)) - Polynomial::constant(reg, pt.at(i)));
        Ideal m(reg, std::move(gens));
        acc = acc ? intersect(*acc, m) : m;
    }
    return *acc;
}

// ---------------------------------------------------------------------------
// Real-radical heuristic

namespace {

Polynomial strip_parameter_content(const Polynomial& g) {
    Polynomial content(g.registry());
    for (const auto& [mono, c] : collect_by_class(g, VarClass::state)) {
        content = content.is_zero() ? c.primitive() : gcd(content, c);
        if (content.is_constant()) return g.primitive();
    }
    return exact_divide(g, content).value().primitive();
}

// Sum of c * x^(2a) with rational c > 0: its real zeros are those of the x^a.
// Returns nullopt if g is not of that shape, else the monomials x^a
// (an empty list means g has a positive constant term and no real zeros).
std::optional<std::vector<Polynomial>> even_positive_monomials(const Polynomial& g) {
    std::vector<Polynomial> out;
    for (const auto& t : g.terms()) {
        if (t.coeff <= 0) return std::nullopt;
        Monomial half(t.mono.arity());
        for (std::size_t v = 0; v < t.mono.arity(); ++v) {
            if (t.mono.exp[v] % 2 != 0) return std::nullopt;
            if (g.registry()->symbol(v).kind == VarClass::parameter && t.mono.exp[v] != 0) return std::nullopt;
            half.exp[v] = t.mono.exp[v] / 2;
            half.degree += half.exp[v];
        }
        if (half.is_one()) return std::vector<Polynomial>{};
        out.push_back(Polynomial::monomial(g.registry(), half, 1));
    }
    return out;
}

std::vector<std::size_t> state_vars_of(const Polynomial& p) {
    std::vector<std::size_t> out;
    for (std::size_t v : p.variables())
        if (p.registry()->symbol(v).kind == VarClass::state) out.push_back(v);
    return out;
}

std::vector<Polynomial> split_by_content(const Polynomial& f) {
    std::vector<Polynomial> out, work{f};
    while (!work.empty()) {
        Polynomial q = work.back();
        work.pop_back();
        if (!q.uses_class(VarClass::state)) continue;
        bool split = false;
        for (std::size_t v : state_vars_of(q)) {
            Polynomial c(q.registry());
            for (const auto& k : q.coefficients_in(v)) {
                if (k.is_zero()) continue;
                c = c.is_zero() ? k.primitive() : gcd(c, k);
                if (c.is_constant()) break;
            }
            if (c.uses_class(VarClass::state)) {
                work.push_back(c);
                work.push_back(exact_divide(q, c).value());
                split = true;
                break;
            }
        }
        if (!split) out.push_back(q.primitive());
    }
    std::sort(out.begin(), out.end(), [](const Polynomial& a, const Polynomial& b) { return a.to_string() < b.to_string(); });
    return out;
}

// Each irreducible factor of the square-free q changes sign somewhere.
bool has_sign_changing_factors(const Polynomial& q) {
    for (std::size_t v : state_vars_of(q)) {
        if (q.degree_in(v) != 1) continue;
        auto cs = q.coefficients_in(v);
        if (cs[0].is_zero() || !gcd(cs[0], cs[1]).uses_class(VarClass::state)) return true;
    }
    std::mt19937_64 rng(0xacce55);
    std::uniform_int_distribution<int> pick(-12, 12);
    for (std::size_t v : state_vars_of(q)) {
        const int d = q.degree_in(v);
        for (int attempt = 0; attempt < 8; ++attempt) {
            Assignment point;
            for (std::size_t w : q.variables())
                if (w != v) point[w] = Rational(pick(rng), 1 + attempt % 3);
            UPoly u = univariate(q.partial_evaluate(point), v);
            if (u.degree() != d) continue;
            if (gcd(u, u.derivative()).degree() > 0) continue;
            if (static_cast<int>(count_real_roots(u)) == d) return true;
        }
    }
    return false;
}

RadicalResult radical_rec(const Ideal& ideal, int depth);

RadicalResult principal_radical(const Polynomial& f, int depth) {
    const RegistryPtr& reg = f.registry();
    Polynomial s = square_free_part(strip_parameter_content(f));
    if (!s.uses_class(VarClass::state)) return {Ideal::unit(reg), true, "constant generator"};
    if (auto mons = even_positive_monomials(s)) {
        if (mons->empty()) return {Ideal::unit(reg), true, "positive definite generator"};
    }
    // Factors that are sums of positive even monomials vanish exactly where
    // their monomials do; everything else must change sign.
    Polynomial rest = Polynomial::constant(reg, 1);
    std::vector<Ideal> even_parts;
    bool certified = true;
    for (const auto& q : split_by_content(s)) {
        if (auto mons = even_positive_monomials(q)) {
            if (mons->empty()) continue;
            even_parts.push_back(Ideal(reg, *mons));
            continue;
        }
        if (!has_sign_changing_factors(q)) certified = false;
        rest *= q;
    }
    std::string method = certified ? "principal square-free reduction over sign-changing factors"
                                   : "principal square-free reduction (sign changes not established)";
    Ideal j(reg, {rest}, certified ? Certification::exact : Certification::heuristic);
    if (even_parts.empty()) return {j, certified, method};
    for (const auto& e : even_parts) {
        RadicalResult r = radical_rec(e, depth + 1);
        certified = certified && r.certified;
        j = intersect(j, r.ideal);
    }
    return {j.with_certification(certified ? Certification::exact : Certification::heuristic), certified,
            method + ", with definite factors replaced by their monomials"};
}

RadicalResult zero_dim_case(const Ideal& j) {
    const RegistryPtr& reg = j.registry();
    Ideal rad = zero_dim_radical(j);
    if (rad.is_unit()) return {rad, true, "no complex points"};
    if (any_uses_params(rad.basis())) {
        if (rad.quotient_dimension() == std::optional<std::size_t>(1))
            return {rad, true, "single point over the parameter field"};
        return {rad.with_certification(Certification::heuristic), false,
                "zero-dimensional radical; real points depend on parameters"};
    }
    SolveResult sol = solve_zero_dim(rad);
    if (sol.status != SolveResult::Status::points)
        return {rad.with_certification(Certification::heuristic), false, "zero-dimensional radical; " + sol.explanation};
    bool all_exact = true;
    std::vector<std::vector<Rational>> pts;
    for (const auto& p : sol.points) {
        std::vector<Rational> v;
        for (const auto& c : p) {
            all_exact = all_exact && c.exact;
            v.push_back(c.value);
        }
        pts.push_back(std::move(v));
    }
    if (all_exact) return {vanishing_ideal(reg, pts), true, "vanishing ideal of the rational real points"};
    if (rad.quotient_dimension() == std::optional<std::size_t>(sol.points.size()))
        return {rad, true, "all complex points are real"};
    return {rad.with_certification(Certification::heuristic), false,
            "zero-dimensional radical; irrational and non-real points mixed"};
}

RadicalResult radical_rec(const Ideal& ideal, int depth) {
    const RegistryPtr& reg = ideal.registry();
    if (ideal.is_zero()) return {ideal, true, "zero ideal"};
    if (ideal.is_unit()) return {Ideal::unit(reg), true, "unit ideal"};

    std::vector<Polynomial> gens;
    for (const auto& g : ideal.basis()) {
        Polynomial s = square_free_part(strip_parameter_content(g));
        if (auto mons = even_positive_monomials(s)) {
            if (mons->empty()) return {Ideal::unit(reg), true, "positive definite generator"};
            for (const auto& m : *mons) gens.push_back(square_free_part(m));
            continue;
        }
        gens.push_back(std::move(s));
    }
    Ideal j(reg, std::move(gens));
    if (j.is_unit()) return {Ideal::unit(reg), true, "unit ideal"};
    const auto& basis = j.basis();
    if (basis.size() == 1) return principal_radical(basis[0], depth);

    Polynomial common = basis[0];
    for (const auto& b : basis) common = gcd(common, b);
    if (common.uses_class(VarClass::state) && depth < 8) {
        std::vector<Polynomial> rest;
        for (const auto& b : basis) rest.push_back(exact_divide(b, common).value());
        RadicalResult r1 = principal_radical(common, depth);
        RadicalResult r2 = radical_rec(Ideal(reg, std::move(rest)), depth + 1);
        bool ok = r1.certified && r2.certified;
        Ideal meet = intersect(r1.ideal, r2.ideal);
        return {meet.with_certification(ok ? Certification::exact : Certification::heuristic), ok,
                "common factor split (" + r1.method + "; " + r2.method + ")"};
    }
    if (j.is_zero_dimensional()) return zero_dim_case(j);
    return {j.with_certification(Certification::heuristic), false,
            "square-free generators of a positive-dimensional ideal"};
}

} // namespace

RadicalResult radical_heuristic(const Ideal& ideal) {
    RadicalResult r = radical_rec(ideal, 0);
    if (r.certified) r.ideal = r.ideal.with_certification(Certification::exact);
    // The unit/zero outcomes do not depend on the input flag; otherwise keep
    // the weakest of input and step.
    if (ideal.certification() == Certification::heuristic) {
        r.ideal = r.ideal.with_certification(Certification::heuristic);
        r.certified = false;
    }
    return r;
}

} // namespace raccess
