#include "raccess/analysis.hpp"

#include <algorithm>
#include <stdexcept>

#include "raccess/errors.hpp"

namespace raccess {

namespace {

void add_unique(std::vector<Polynomial>& out, const Polynomial& p) {
    for (const auto& q : out)
        if (q == p) return;
    out.push_back(p);
}

// Terms ordered by their state and input part first, parameters last.
std::string display(const Polynomial& p) {
    const auto& reg = p.registry();
    auto split = [&](const Monomial& m) {
        Monomial vars(m.arity()), params(m.arity());
        for (std::size_t v = 0; v < m.arity(); ++v) {
            Monomial& dst = reg->symbol(v).kind == VarClass::parameter ? params : vars;
            dst.exp[v] = m.exp[v];
            dst.degree += m.exp[v];
        }
        return std::pair{vars, params};
    };
    std::vector<Term> terms = p.terms();
    std::stable_sort(terms.begin(), terms.end(), [&](const Term& a, const Term& b) {
        auto [va, pa] = split(a.mono);
        auto [vb, pb] = split(b.mono);
        if (int c = grevlex_compare(va, vb)) return c > 0;
        return grevlex_compare(pa, pb) > 0;
    });
    std::string out;
    for (const auto& t : terms) {
        std::string s = Polynomial::monomial(reg, t.mono, t.coeff).to_string();
        if (out.empty()) {
            out = s;
        } else if (s.front() == '-') {
            out += " - " + s.substr(1);
        } else {
            out += " + " + s;
        }
    }
    return out.empty() ? "0" : out;
}

std::string wrap(const Polynomial& p) {
    std::string s = display(p);
    return p.size() > 1 ? "(" + s + ")" : s;
}

} // namespace

Analyzer::Analyzer(SystemModel sys) : builder_(std::move(sys)) {}

const MinorDecomposition& Analyzer::decomposition(int k) {
    auto it = decs_.find(k);
    if (it != decs_.end()) return it->second;
    return decs_.emplace(k, minors_and_coefficients(builder_.matrix(k))).first->second;
}

const Ideal& Analyzer::coefficient_ideal(int k) {
    auto it = ideals_.find(k);
    if (it != ideals_.end()) return it->second;
    Ideal I = raccess::coefficient_ideal(decomposition(k), system());
    return ideals_.emplace(k, std::move(I)).first->second;
}

std::vector<Polynomial> Analyzer::excluded_locus(int k) {
    std::vector<Polynomial> out;
    for (const auto& f : system().phi())
        if (!f.den().is_constant()) add_unique(out, square_free_part(f.den()).primitive());
    for (int l = 1; l <= k; ++l)
        for (const auto& p : decomposition(l).excluded_locus) add_unique(out, p);
    return out;
}

bool Analyzer::submersive() {
    if (!submersive_) submersive_ = submersivity_check(system());
    return *submersive_;
}

bool Analyzer::generically_accessible() { return decomposition(static_cast<int>(system().n())).full_rank(); }

ChainResult Analyzer::kappa_chain(int max_k, bool confirm) {
    ChainResult res;
    const int n = static_cast<int>(system().n());
    if (max_k <= 0) max_k = default_max_k();
    if (!submersive() || !generically_accessible()) return res;

    Ideal cur = coefficient_ideal(n);
    res.history.push_back({n, cur, true, ""});
    int k = n;
    while (true) {
        if (k + 1 > max_k) {
            res.status = ChainResult::Status::budget_exhausted;
            res.ideal = cur;
            return res;
        }
        Ideal next = ideal_sum(cur, coefficient_ideal(k + 1));
        res.history.push_back({k + 1, next, true, ""});
        if (!ideal_equal(cur, next)) {
            cur = std::move(next);
            ++k;
            continue;
        }
        res.status = ChainResult::Status::stabilized;
        res.index = k;
        res.ideal = cur;
        if (!confirm || k + 2 > max_k) return res;
        Ideal after = ideal_sum(next, coefficient_ideal(k + 2));
        res.history.push_back({k + 2, after, true, ""});
        if (ideal_equal(next, after)) {
            res.confirmed = true;
            return res;
        }
        // The stable ideal grew again: keep climbing from the larger ideal.
        res.confirmation_broken = true;
        res.status = ChainResult::Status::not_applicable;
        res.index.reset();
        cur = std::move(after);
        k += 2;
    }
}

ChainResult Analyzer::rstar_chain(int max_k) {
    ChainResult res;
    const int n = static_cast<int>(system().n());
    if (max_k <= 0) max_k = default_max_k();
    if (!submersive() || !generically_accessible()) return res;

    auto step = [&](int k) {
        RadicalResult r = radical_heuristic(coefficient_ideal(k));
        res.certified = res.certified && r.certified;
        res.history.push_back({k, r.ideal, r.certified, r.method});
        return r.ideal;
    };
    Ideal cur = step(n);
    for (int k = n; k + 1 <= max_k; ++k) {
        Ideal next = step(k + 1);
        if (ideal_equal(cur, next)) {
            res.status = ChainResult::Status::stabilized;
            res.index = k;
            res.ideal = cur;
            return res;
        }
        cur = std::move(next);
    }
    res.status = ChainResult::Status::budget_exhausted;
    res.ideal = cur;
    return res;
}

PointVerdict Analyzer::point_status(const std::vector<Rational>& x0, int k) {
    if (x0.size() != system().n()) throw std::invalid_argument("point_status: point has the wrong dimension");
    if (k < 1) throw std::invalid_argument("point_status: k must be positive");
    PointVerdict v{x0, k, false, false};
    // Minors of M_l(x0, u) vanish identically exactly when every
    // coefficient a_{l,i,j} vanishes at x0. Ī_k sums I_{M_n}..I_{M_k}.
    AccessMatrixBuilder at(system(), x0);
    try {
        at.matrix(k);
    } catch (const DegeneracyError&) {
        v.undefined = true;
        return v;
    }
    const int first = k >= static_cast<int>(system().n()) ? static_cast<int>(system().n()) : 1;
    for (int l = k; l >= first; --l)
        if (generic_full_rank(at.matrix(l).entries)) return v;
    v.in_S_k = true;
    return v;
}

AnalysisReport Analyzer::analyze(const AnalysisOptions& options) {
    AnalysisReport rep;
    const SystemModel& sys = system();
    rep.system = sys.name();
    rep.n = sys.n();
    rep.m = sys.m();
    const int max_k = options.max_k > 0 ? options.max_k : default_max_k();
    rep.submersive = submersive();
    rep.generically_accessible = generically_accessible();
    if (!rep.submersive || !rep.generically_accessible) {
        rep.singular_set.kind = SingularSet::Kind::entire_space;
        rep.excluded_locus = excluded_locus(static_cast<int>(sys.n()));
        return rep;
    }

    rep.kappa = kappa_chain(max_k, options.confirm);
    if (options.exact_radical) rep.r_star = rstar_chain(max_k);
    const ChainResult& chain = rep.kappa;
    int deepest = chain.history.empty() ? static_cast<int>(sys.n()) : chain.history.back().k;
    rep.excluded_locus = excluded_locus(deepest);
    for (const auto& st : chain.history)
        for (const auto& c : st.ideal.parameter_conditions()) add_unique(rep.parameter_conditions, c);

    rep.singular_set = describe_zero_set(chain.ideal);
    if (chain.status == ChainResult::Status::stabilized) {
        rep.invariant = invariance_check(chain.ideal, sys);
    } else {
        rep.certification = Certification::heuristic;
        std::string why = "chain did not stabilize by k = " + std::to_string(max_k) +
                          "; the set shown is S_" + std::to_string(deepest) + ", which contains S_inf";
        rep.singular_set.note = rep.singular_set.note.empty() ? why : why + "; " + rep.singular_set.note;
    }
    return rep;
}

bool generic_accessibility(const SystemModel& sys) { return Analyzer(sys).generically_accessible(); }
ChainResult kappa_chain(const SystemModel& sys, int max_k, bool confirm) {
    return Analyzer(sys).kappa_chain(max_k, confirm);
}
ChainResult rstar_chain(const SystemModel& sys, int max_k) { return Analyzer(sys).rstar_chain(max_k); }

PointVerdict point_status(const SystemModel& sys, const std::vector<Rational>& x0, int k) {
    return Analyzer(sys).point_status(x0, k);
}

bool invariance_check(const Ideal& ideal, const SystemModel& sys) {
    if (ideal.is_unit() || ideal.is_zero()) return true;
    const RegistryPtr& reg = sys.registry();
    const RegistryPtr r0 = sys.state_registry();
    if (!same_ring(ideal.registry(), r0)) throw std::invalid_argument("invariance_check: ideal is not over the system's states");
    Bindings b;
    for (std::size_t i = 0; i < sys.n(); ++i) b[reg->state_var(i)] = sys.phi()[i];
    for (const auto& g : ideal.basis()) {
        RationalFunction image = substitute(RationalFunction(g.embed(reg)), b);
        for (const auto& [mono, c] : collect_by_class(image.num(), VarClass::input))
            if (!contains(ideal, c.embed(r0))) return false;
    }
    return true;
}

SingularSet describe_zero_set(const Ideal& ideal) {
    SingularSet s;
    if (ideal.is_unit()) {
        s.kind = SingularSet::Kind::empty;
        return s;
    }
    if (ideal.is_zero()) {
        s.kind = SingularSet::Kind::entire_space;
        return s;
    }
    s.generators = ideal.basis();
    if (!ideal.is_zero_dimensional()) {
        s.kind = SingularSet::Kind::generators;
        return s;
    }
    SolveResult r = solve_zero_dim(ideal);
    if (r.status != SolveResult::Status::points) {
        s.kind = SingularSet::Kind::generators;
        s.note = r.explanation;
        return s;
    }
    s.points = std::move(r.points);
    s.kind = s.points.empty() ? SingularSet::Kind::empty : SingularSet::Kind::points;
    return s;
}

AnalysisReport analyze(const SystemModel& sys, const AnalysisOptions& options) {
    return Analyzer(sys).analyze(options);
}

AnalysisReport backward_analysis(const SystemModel& inverse_sys, const AnalysisOptions& options) {
    AnalysisReport rep = analyze(inverse_sys, options);
    rep.backward = true;
    return rep;
}

std::string factored_string(const Polynomial& p) {
    if (p.is_zero()) return "0";
    if (p.is_constant()) return p.to_string();
    const auto& reg = p.registry();

    // Monomial content over all variables.
    Monomial content = p.terms().front().mono;
    for (const auto& t : p.terms()) content = Monomial::gcd(content, t.mono);
    std::vector<Term> rest_terms;
    for (const auto& t : p.terms()) rest_terms.push_back({t.mono.quotient(content), t.coeff});
    Polynomial rest = Polynomial::from_terms(reg, std::move(rest_terms));

    // Parameter content of what remains.
    Polynomial pc;
    bool has_pc = false;
    if (reg->num_params() > 0 && rest.uses_class(VarClass::state)) {
        for (const auto& [mono, c] : collect_by_class(rest, VarClass::state)) {
            pc = has_pc ? gcd(pc, c) : c.primitive();
            has_pc = true;
        }
        if (has_pc && !pc.is_constant()) {
            rest = *exact_divide(rest, pc);
        } else {
            has_pc = false;
        }
    }

    std::vector<std::string> parts;
    Rational scalar = 1;
    if (rest.is_constant()) {
        scalar = rest.constant_term();
    } else {
        Polynomial prim = rest.primitive();
        scalar = rest.leading_term().coeff / prim.leading_term().coeff;
        rest = prim;
    }
    if (has_pc) parts.push_back(wrap(pc));
    for (std::size_t v = 0; v < content.arity(); ++v) {
        if (content.exp[v] == 0) continue;
        std::string s = reg->symbol(v).name;
        if (content.exp[v] > 1) s += "^" + std::to_string(content.exp[v]);
        parts.push_back(s);
    }
    if (!rest.is_constant()) parts.push_back(wrap(rest));
    if (scalar == 1 && parts.size() == 1 && parts[0].front() == '(') return parts[0].substr(1, parts[0].size() - 2);
    std::string out;
    if (scalar == -1) {
        out = "-";
    } else if (scalar != 1 || parts.empty()) {
        out = scalar.get_str() + (parts.empty() ? "" : "*");
    }
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "*" : "") + parts[i];
    return out;
}

} // namespace raccess
