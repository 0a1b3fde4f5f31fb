#include "raccess/system.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "raccess/errors.hpp"

namespace raccess {

RFMatrix::RFMatrix(std::size_t r, std::size_t c, const RationalFunction& fill) : rows(r), cols(c), data(r * c, fill) {}

// ---------------------------------------------------------------------------
// SystemModel

SystemModel::SystemModel(std::string name, RegistryPtr reg, std::vector<RationalFunction> phi)
    : name_(std::move(name)), regs_(std::make_shared<Registries>()) {
    if (!reg) throw std::invalid_argument("SystemModel: null registry");
    if (reg->n() == 0) throw std::invalid_argument("SystemModel: at least one state is required");
    if (reg->m() == 0) throw std::invalid_argument("SystemModel: at least one input is required");
    if (phi.size() != reg->n())
        throw std::invalid_argument("SystemModel: expected " + std::to_string(reg->n()) + " update maps, got " +
                                    std::to_string(phi.size()));
    reg_ = reg->horizon() == 1 ? reg : reg->with_horizon(1);
    regs_->by_horizon[1] = reg_;
    for (auto& f : phi) {
        if (f.den().is_zero()) throw std::invalid_argument("SystemModel: zero denominator");
        if (!same_ring(f.registry(), reg)) throw std::invalid_argument("SystemModel: map over a foreign registry");
        phi_.push_back(f.embed(reg_));
    }
}

std::size_t SystemModel::m() const { return reg_ ? reg_->m() : 0; }

RegistryPtr SystemModel::registry(int horizon) const {
    if (horizon < 0) throw std::invalid_argument("registry: negative horizon");
    std::lock_guard<std::mutex> lock(regs_->mu);
    auto& slot = regs_->by_horizon[horizon];
    if (!slot) slot = reg_->with_horizon(horizon);
    return slot;
}

SystemModel SystemModel::bind(const std::map<std::string, Rational>& values) const {
    Bindings b;
    std::vector<std::string> kept;
    for (const auto& p : reg_->param_names()) {
        auto it = values.find(p);
        if (it == values.end()) {
            kept.push_back(p);
            continue;
        }
        b[*reg_->find(p)] = RationalFunction::constant(reg_, it->second);
    }
    for (const auto& [name, v] : values)
        if (std::find(reg_->param_names().begin(), reg_->param_names().end(), name) == reg_->param_names().end())
            throw std::invalid_argument("bind: '" + name + "' is not a parameter");
    RegistryPtr target = VariableRegistry::create(kept, reg_->state_names(), reg_->input_names(), 1);
    std::vector<RationalFunction> out;
    for (const auto& f : phi_) out.push_back(remap(substitute(f, b), target));
    return SystemModel(name_, target, std::move(out));
}

Polynomial remap(const Polynomial& p, const RegistryPtr& target) {
    const auto& src = p.registry();
    if (same_ring(src, target)) return p.embed(target);
    std::vector<std::size_t> where(src->size(), target->size());
    std::vector<Term> terms;
    terms.reserve(p.size());
    for (const auto& t : p.terms()) {
        Term nt{Monomial(target->size()), t.coeff};
        for (std::size_t v = 0; v < src->size(); ++v) {
            if (t.mono.exp[v] == 0) continue;
            if (where[v] == target->size()) {
                auto idx = target->find(src->symbol(v).name);
                if (!idx) throw std::invalid_argument("remap: '" + src->symbol(v).name + "' missing from target");
                where[v] = *idx;
            }
            nt.mono.exp[where[v]] = t.mono.exp[v];
        }
        nt.mono.degree = t.mono.degree;
        terms.push_back(std::move(nt));
    }
    return Polynomial::from_terms(target, std::move(terms));
}

RationalFunction remap(const RationalFunction& f, const RegistryPtr& target) {
    return RationalFunction(remap(f.num(), target), remap(f.den(), target));
}

// ---------------------------------------------------------------------------
// Shifts and Jacobians

namespace {

// One step: x <- X (over `target`), u(s) <- u(s + 1).
RationalFunction shift_once(const RationalFunction& f, const std::vector<RationalFunction>& X,
                            const RegistryPtr& target) {
    const auto& src = f.registry();
    RationalFunction g = f.embed(target);
    Bindings b;
    for (std::size_t i = 0; i < src->n(); ++i) b[target->state_var(i)] = X[i];
    for (std::size_t v = 0; v < src->size(); ++v) {
        const Symbol& s = src->symbol(v);
        if (s.kind != VarClass::input) continue;
        b[v] = RationalFunction::variable(target, target->input_var(static_cast<std::size_t>(s.slot), s.time + 1));
    }
    return substitute(g, b);
}

// phi evaluated at (x <- X over reg(t), u(0) <- u(t - 1)): the state x(t).
std::vector<RationalFunction> advance(const SystemModel& sys, const std::vector<RationalFunction>& X, int t) {
    RegistryPtr target = sys.registry(t);
    Bindings b;
    for (std::size_t i = 0; i < sys.n(); ++i) b[target->state_var(i)] = X[i].embed(target);
    for (std::size_t j = 0; j < sys.m(); ++j)
        b[target->input_var(j, 0)] = RationalFunction::variable(target, target->input_var(j, t - 1));
    std::vector<RationalFunction> out;
    out.reserve(sys.n());
    for (const auto& f : sys.phi()) out.push_back(substitute(f.embed(target), b));
    return out;
}

std::vector<RationalFunction> identity_state(const SystemModel& sys) {
    RegistryPtr r0 = sys.registry(0);
    std::vector<RationalFunction> X;
    for (std::size_t i = 0; i < sys.n(); ++i) X.push_back(RationalFunction::variable(r0, r0->state_var(i)));
    return X;
}

// Entry (x <- X, u(0) <- u(t)) over reg(t + 1).
RationalFunction at_time(const RationalFunction& f, const SystemModel& sys, const std::vector<RationalFunction>& X,
                         int t, bool identity) {
    RegistryPtr target = sys.registry(t + 1);
    if (t == 0 && identity) return f.embed(target);
    Bindings b;
    for (std::size_t i = 0; i < sys.n(); ++i) b[target->state_var(i)] = X[i].embed(target);
    for (std::size_t j = 0; j < sys.m(); ++j)
        b[target->input_var(j, 0)] = RationalFunction::variable(target, target->input_var(j, t));
    return substitute(f.embed(target), b);
}

} // namespace

RationalFunction shift(const RationalFunction& f, const SystemModel& sys, int t) {
    if (t < 0) throw std::invalid_argument("shift: negative step count");
    if (!same_ring(f.registry(), sys.registry(f.registry()->horizon())))
        throw std::invalid_argument("shift: function is not over the system's variables");
    if (t == 0) return f;
    const int h = f.registry()->horizon();
    RationalFunction g = f.embed(sys.registry(h));
    std::vector<RationalFunction> X1 = sys.phi();
    for (int s = 1; s <= t; ++s) {
        RegistryPtr target = sys.registry(h + s);
        std::vector<RationalFunction> X;
        for (const auto& p : X1) X.push_back(p.embed(target));
        g = shift_once(g, X, target);
    }
    return g;
}

Jacobians jacobians(const SystemModel& sys) {
    const auto& reg = sys.registry();
    RationalFunction zero = RationalFunction::constant(reg, 0);
    Jacobians J{RFMatrix(sys.n(), sys.n(), zero), RFMatrix(sys.n(), sys.m(), zero)};
    for (std::size_t i = 0; i < sys.n(); ++i) {
        for (std::size_t j = 0; j < sys.n(); ++j) J.A.at(i, j) = differentiate(sys.phi()[i], reg->state_var(j));
        for (std::size_t j = 0; j < sys.m(); ++j) J.B.at(i, j) = differentiate(sys.phi()[i], reg->input_var(j, 0));
    }
    return J;
}

// ---------------------------------------------------------------------------
// Access matrices

AccessMatrixBuilder::AccessMatrixBuilder(SystemModel sys) : sys_(std::move(sys)), jac_(jacobians(sys_)) {
    states_.push_back(identity_state(sys_));
}

AccessMatrixBuilder::AccessMatrixBuilder(SystemModel sys, const std::vector<Rational>& x0)
    : sys_(std::move(sys)), jac_(jacobians(sys_)), identity_(false) {
    if (x0.size() != sys_.n()) throw std::invalid_argument("AccessMatrixBuilder: point has the wrong dimension");
    std::vector<RationalFunction> X;
    for (const auto& v : x0) X.push_back(RationalFunction::constant(sys_.registry(0), v));
    states_.push_back(std::move(X));
}

const std::vector<RationalFunction>& AccessMatrixBuilder::state(int t) {
    if (t < 0) throw std::invalid_argument("state: negative time");
    while (static_cast<int>(states_.size()) <= t) {
        const int next = static_cast<int>(states_.size());
        states_.push_back(advance(sys_, states_.back(), next));
    }
    return states_[static_cast<std::size_t>(t)];
}

const AccessMatrix& AccessMatrixBuilder::matrix(int k) {
    if (k < 1) throw std::invalid_argument("build_M: k must be positive");
    const std::size_t n = sys_.n(), m = sys_.m();
    while (static_cast<int>(mats_.size()) < k) {
        const int kk = static_cast<int>(mats_.size()) + 1;
        RegistryPtr reg = sys_.registry(kk);
        RationalFunction zero = RationalFunction::constant(reg, 0);
        AccessMatrix M{kk, RFMatrix(n, static_cast<std::size_t>(kk) * m, zero)};
        const auto& X = state(kk - 1);
        std::vector<RationalFunction> Bs;
        for (const auto& e : jac_.B.data) Bs.push_back(at_time(e, sys_, X, kk - 1, identity_));
        if (kk > 1) {
            std::vector<RationalFunction> As;
            for (const auto& e : jac_.A.data) As.push_back(at_time(e, sys_, X, kk - 1, identity_));
            const AccessMatrix& prev = mats_.back();
            const std::size_t pc = prev.entries.cols;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t c = 0; c < pc; ++c) {
                    RationalFunction acc = zero;
                    for (std::size_t l = 0; l < n; ++l) {
                        const auto& a = As[i * n + l];
                        if (a.is_zero()) continue;
                        const auto& pe = prev.entries.at(l, c);
                        if (pe.is_zero()) continue;
                        acc = acc + a * pe.embed(reg);
                    }
                    M.entries.at(i, c) = std::move(acc);
                }
            }
        }
        const std::size_t off = static_cast<std::size_t>(kk - 1) * m;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) M.entries.at(i, off + j) = Bs[i * m + j];
        mats_.push_back(std::move(M));
    }
    return mats_[static_cast<std::size_t>(k - 1)];
}

AccessMatrix build_M(const SystemModel& sys, int k) {
    AccessMatrixBuilder b(sys);
    return b.matrix(k);
}

// ---------------------------------------------------------------------------
// Minors

Polynomial bareiss_determinant(std::vector<std::vector<Polynomial>> a) {
    const std::size_t n = a.size();
    if (n == 0) throw std::invalid_argument("bareiss_determinant: empty matrix");
    RegistryPtr reg = a[0][0].registry();
    Polynomial prev = Polynomial::constant(reg, 1);
    bool negate = false;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k].is_zero()) {
            std::size_t p = k + 1;
            while (p < n && a[p][k].is_zero()) ++p;
            if (p == n) return Polynomial(reg);
            std::swap(a[k], a[p]);
            negate = !negate;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                Polynomial t = a[k][k] * a[i][j] - a[i][k] * a[k][j];
                if (prev.is_constant()) {
                    a[i][j] = t.scaled(1 / prev.constant_term());
                } else {
                    auto q = exact_divide(t, prev);
                    if (!q) throw std::logic_error("bareiss_determinant: inexact division");
                    a[i][j] = std::move(*q);
                }
            }
            a[i][k] = Polynomial(reg);
        }
        prev = a[k][k];
    }
    Polynomial d = a[n - 1][n - 1];
    return negate ? -d : d;
}

namespace {

void add_factor(std::vector<Polynomial>& locus, const Polynomial& den) {
    if (den.is_constant()) return;
    Polynomial f = square_free_part(den).primitive();
    for (const auto& g : locus)
        if (g == f) return;
    locus.push_back(std::move(f));
}

// Pairwise coprime nonconstant factors such that every inserted polynomial
// is a product of their powers.
class CoprimeBase {
public:
    void insert(const Polynomial& p) {
        std::vector<Polynomial> queue{p};
        while (!queue.empty()) {
            Polynomial d = std::move(queue.back());
            queue.pop_back();
            if (d.is_constant()) continue;
            d = d.primitive();
            bool split = false;
            for (std::size_t i = 0; i < atoms_.size(); ++i) {
                if (atoms_[i] == d) {
                    split = true;
                    break;
                }
                Polynomial g = gcd(atoms_[i], d);
                if (g.is_constant()) continue;
                Polynomial a = std::move(atoms_[i]);
                atoms_.erase(atoms_.begin() + static_cast<std::ptrdiff_t>(i));
                queue.push_back(*exact_divide(a, g));
                queue.push_back(*exact_divide(d, g));
                queue.push_back(std::move(g));
                split = true;
                break;
            }
            if (!split) atoms_.push_back(std::move(d));
        }
    }

    /// Exponent of each atom in p, which must factor over the base.
    std::vector<unsigned> exponents(Polynomial p) const {
        std::vector<unsigned> e(atoms_.size(), 0);
        for (std::size_t i = 0; i < atoms_.size() && !p.is_constant(); ++i)
            while (auto q = exact_divide(p, atoms_[i])) {
                p = std::move(*q);
                ++e[i];
            }
        if (!p.is_constant()) throw std::logic_error("CoprimeBase: polynomial does not factor over the base");
        return e;
    }

    const std::vector<Polynomial>& atoms() const noexcept { return atoms_; }

private:
    std::vector<Polynomial> atoms_;
};

Polynomial atom_power(const CoprimeBase& base, const std::vector<unsigned>& e, const RegistryPtr& reg) {
    Polynomial out = Polynomial::constant(reg, 1);
    for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i]) out *= base.atoms()[i].pow(e[i]);
    return out;
}

// Rows scaled by the lcm of their denominators, with the scale kept factored.
struct ClearedRows {
    std::vector<std::vector<Polynomial>> rows;
    CoprimeBase base;
    std::vector<unsigned> scale;  // exponent of each atom in the product of the row lcms
};

ClearedRows clear_rows(const RFMatrix& M) {
    ClearedRows out;
    for (const auto& e : M.data)
        if (!e.is_polynomial()) out.base.insert(e.den());
    const std::size_t na = out.base.atoms().size();
    out.scale.assign(na, 0);
    const RegistryPtr& reg = M.at(0, 0).registry();
    for (std::size_t r = 0; r < M.rows; ++r) {
        std::vector<std::vector<unsigned>> ex(M.cols);
        std::vector<unsigned> lcm(na, 0);
        for (std::size_t c = 0; c < M.cols; ++c) {
            ex[c] = M.at(r, c).is_polynomial() ? std::vector<unsigned>(na, 0) : out.base.exponents(M.at(r, c).den());
            for (std::size_t i = 0; i < na; ++i) lcm[i] = std::max(lcm[i], ex[c][i]);
        }
        std::vector<Polynomial> row;
        for (std::size_t c = 0; c < M.cols; ++c) {
            const auto& e = M.at(r, c);
            std::vector<unsigned> rest(na);
            for (std::size_t i = 0; i < na; ++i) rest[i] = lcm[i] - ex[c][i];
            Rational unit = 1;
            if (!e.is_polynomial()) {
                // den equals the atom product up to a rational unit.
                Polynomial prod = atom_power(out.base, ex[c], reg);
                unit = prod.leading_term().coeff / e.den().leading_term().coeff;
            }
            row.push_back((e.num() * atom_power(out.base, rest, reg)).scaled(unit));
        }
        out.rows.push_back(std::move(row));
        for (std::size_t i = 0; i < na; ++i) out.scale[i] += lcm[i];
    }
    return out;
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t total) {
    const std::size_t k = idx.size();
    for (std::size_t i = k; i-- > 0;) {
        if (idx[i] < total - k + i) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

// Reduced numerators of all maximal minors, columns in lexicographic order.
template <class Visit>
void for_each_minor(const RFMatrix& M, const Visit& visit) {
    const std::size_t n = M.rows;
    if (n == 0 || M.cols < n) return;
    ClearedRows cr = clear_rows(M);
    const RegistryPtr& reg = M.at(0, 0).registry();
    std::vector<std::size_t> cols(n);
    for (std::size_t i = 0; i < n; ++i) cols[i] = i;
    do {
        std::vector<std::vector<Polynomial>> sub(n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c : cols) sub[r].push_back(cr.rows[r][c]);
        Polynomial num = bareiss_determinant(std::move(sub));
        if (!num.is_zero() && !cr.base.atoms().empty()) {
            // Cancel atoms by trial division; the final normalization then
            // only has to confirm coprimality.
            std::vector<unsigned> left = cr.scale;
            for (std::size_t i = 0; i < left.size(); ++i)
                while (left[i] > 0) {
                    auto q = exact_divide(num, cr.base.atoms()[i]);
                    if (!q) break;
                    num = std::move(*q);
                    --left[i];
                }
            num = RationalFunction(num, atom_power(cr.base, left, reg)).num();
        }
        if (!visit(cols, num)) return;
    } while (next_combination(cols, M.cols));
}

} // namespace

bool MinorDecomposition::full_rank() const {
    return std::any_of(minors.begin(), minors.end(), [](const Minor& m) { return !m.numerator.is_zero(); });
}

MinorDecomposition minors_and_coefficients(const AccessMatrix& M) {
    MinorDecomposition dec;
    dec.k = M.k;
    dec.registry = M.entries.data.empty() ? RegistryPtr{} : M.entries.data.front().registry();
    for (const auto& e : M.entries.data) add_factor(dec.excluded_locus, e.den());
    for_each_minor(M.entries, [&](const std::vector<std::size_t>& cols, const Polynomial& num) {
        Minor mi;
        mi.columns = cols;
        mi.numerator = num;
        if (!num.is_zero())
            for (auto& [mono, a] : collect_by_class(num, VarClass::input)) mi.coefficients.emplace_back(mono, a);
        dec.minors.push_back(std::move(mi));
        return true;
    });
    return dec;
}

Ideal coefficient_ideal(const MinorDecomposition& dec, const SystemModel& sys) {
    RegistryPtr r0 = sys.state_registry();
    std::vector<Polynomial> gens;
    for (const auto& mi : dec.minors)
        for (const auto& [mono, a] : mi.coefficients) gens.push_back(a.embed(r0));
    return Ideal(r0, std::move(gens));
}

bool generic_full_rank(const RFMatrix& M) {
    const std::size_t n = M.rows, c = M.cols;
    if (c < n) return false;
    // Full rank at any point proves full generic rank; only an all-deficient
    // outcome falls back to symbolic minors.
    std::mt19937_64 rng(0x5eed5ULL);
    std::uniform_int_distribution<int> num(-50, 50), den(1, 17);
    const auto& reg = M.at(0, 0).registry();
    for (int attempt = 0; attempt < 4; ++attempt) {
        Assignment pt;
        for (std::size_t v = 0; v < reg->size(); ++v) pt[v] = Rational(num(rng), den(rng));
        std::vector<std::vector<Rational>> a(n, std::vector<Rational>(c));
        try {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < c; ++j) a[i][j] = evaluate(M.at(i, j), pt);
        } catch (const EvaluationError&) {
            continue;
        }
        std::size_t rank = 0;
        for (std::size_t col = 0; col < c && rank < n; ++col) {
            std::size_t p = rank;
            while (p < n && a[p][col] == 0) ++p;
            if (p == n) continue;
            std::swap(a[p], a[rank]);
            for (std::size_t i = rank + 1; i < n; ++i) {
                Rational f = a[i][col] / a[rank][col];
                for (std::size_t j = col; j < c; ++j) a[i][j] -= f * a[rank][j];
            }
            ++rank;
        }
        if (rank == n) return true;
    }
    bool found = false;
    for_each_minor(M, [&](const std::vector<std::size_t>&, const Polynomial& minor) {
        found = !minor.is_zero();
        return !found;
    });
    return found;
}

bool submersivity_check(const SystemModel& sys) {
    Jacobians J = jacobians(sys);
    const std::size_t n = sys.n(), m = sys.m();
    RFMatrix full(n, n + m, RationalFunction::constant(sys.registry(), 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) full.at(i, j) = J.A.at(i, j);
        for (std::size_t j = 0; j < m; ++j) full.at(i, n + j) = J.B.at(i, j);
    }
    return generic_full_rank(full);
}

bool on_excluded_locus(const std::vector<Polynomial>& locus, const std::vector<Rational>& x0) {
    for (const auto& f : locus) {
        const auto& reg = f.registry();
        if (x0.size() != reg->n()) throw std::invalid_argument("on_excluded_locus: point has the wrong dimension");
        Assignment pt;
        for (std::size_t i = 0; i < reg->n(); ++i) pt[reg->state_var(i)] = x0[i];
        bool vanishes = true;
        for (const auto& [mono, c] : collect_by_class(f, VarClass::input)) {
            if (!c.partial_evaluate(pt).is_zero()) {
                vanishes = false;
                break;
            }
        }
        if (vanishes) return true;
    }
    return false;
}

} // namespace raccess
