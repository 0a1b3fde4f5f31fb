#include "raccess/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "raccess/errors.hpp"

namespace raccess {

namespace {

// First-order forward-mode jet with a dense gradient.
struct Jet {
    double v = 0;
    std::vector<double> d;

    Jet() = default;
    Jet(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
    Jet(double value, std::size_t dim, std::size_t seed) : v(value), d(dim, 0.0) { d[seed] = 1.0; }
};

Jet combine(const Jet& a, const Jet& b, double v, double da, double db) {
    Jet r(v);
    const std::size_t dim = std::max(a.d.size(), b.d.size());
    if (dim == 0) return r;
    r.d.assign(dim, 0.0);
    for (std::size_t i = 0; i < a.d.size(); ++i) r.d[i] += da * a.d[i];
    for (std::size_t i = 0; i < b.d.size(); ++i) r.d[i] += db * b.d[i];
    return r;
}

Jet chain(const Jet& a, double v, double dv) {
    Jet r(v);
    r.d.resize(a.d.size());
    for (std::size_t i = 0; i < a.d.size(); ++i) r.d[i] = dv * a.d[i];
    return r;
}

Jet operator+(const Jet& a, const Jet& b) { return combine(a, b, a.v + b.v, 1, 1); }
Jet operator-(const Jet& a, const Jet& b) { return combine(a, b, a.v - b.v, 1, -1); }
Jet operator*(const Jet& a, const Jet& b) { return combine(a, b, a.v * b.v, b.v, a.v); }
Jet operator-(const Jet& a) { return chain(a, -a.v, -1); }
Jet operator/(const Jet& a, const Jet& b) { return combine(a, b, a.v / b.v, 1 / b.v, -a.v / (b.v * b.v)); }
Jet sin(const Jet& a) { return chain(a, std::sin(a.v), std::cos(a.v)); }
Jet cos(const Jet& a) { return chain(a, std::cos(a.v), -std::sin(a.v)); }
Jet tan(const Jet& a) {
    const double t = std::tan(a.v);
    return chain(a, t, 1 + t * t);
}
Jet exp(const Jet& a) {
    const double e = std::exp(a.v);
    return chain(a, e, e);
}
Jet log(const Jet& a) { return chain(a, std::log(a.v), 1 / a.v); }
Jet sqrt(const Jet& a) {
    const double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s);
}

double value_of(double s) { return s; }
double value_of(const Jet& s) { return s.v; }

template <class S>
S eval_poly(const Polynomial& p, const std::vector<S>& values) {
    S acc(0.0);
    for (const auto& t : p.terms()) {
        S term(t.coeff.get_d());
        for (std::size_t v = 0; v < t.mono.arity(); ++v)
            for (unsigned e = 0; e < t.mono.exp[v]; ++e) term = term * values[v];
        acc = acc + term;
    }
    return acc;
}

std::vector<std::vector<double>> random_inputs(std::mt19937_64& rng, std::size_t k, std::size_t m, double lo,
                                               double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<std::vector<double>> u(k, std::vector<double>(m));
    for (auto& row : u)
        for (auto& c : row) c = dist(rng);
    return u;
}

void require_inputs(const NumericMap& map, const std::vector<double>& x0, const std::vector<std::vector<double>>& u) {
    if (x0.size() != map.n()) throw std::invalid_argument("oracle: initial state has the wrong dimension");
    for (const auto& row : u)
        if (row.size() != map.m()) throw std::invalid_argument("oracle: input vector has the wrong dimension");
}

} // namespace

NumericMap NumericMap::from_system(const SystemModel& sys, const std::map<std::string, double>& params) {
    NumericMap out;
    out.reg_ = sys.registry();
    out.n_ = sys.n();
    out.m_ = sys.m();
    out.rational_ = sys.phi();
    for (std::size_t i = 0; i < out.reg_->num_params(); ++i) {
        const std::size_t v = out.reg_->param_var(i);
        const std::string& name = out.reg_->symbol(v).name;
        auto it = params.find(name);
        if (it == params.end()) throw std::invalid_argument("oracle: parameter " + name + " needs a numeric value");
        out.params_[v] = it->second;
    }
    return out;
}

NumericMap NumericMap::from_expressions(RegistryPtr reg, std::vector<ExprPtr> updates,
                                        const std::map<std::string, double>& params) {
    if (updates.size() != reg->n()) throw std::invalid_argument("oracle: one update per state is required");
    NumericMap out;
    out.reg_ = std::move(reg);
    out.n_ = out.reg_->n();
    out.m_ = out.reg_->m();
    out.exprs_ = std::move(updates);
    for (std::size_t i = 0; i < out.reg_->num_params(); ++i) {
        const std::size_t v = out.reg_->param_var(i);
        const std::string& name = out.reg_->symbol(v).name;
        auto it = params.find(name);
        if (it == params.end()) throw std::invalid_argument("oracle: parameter " + name + " needs a numeric value");
        out.params_[v] = it->second;
    }
    return out;
}

template <class S>
std::vector<S> NumericMap::apply(const std::vector<S>& x, const std::vector<S>& u) const {
    std::vector<S> values(reg_->size(), S(0.0));
    for (const auto& [v, c] : params_) values[v] = S(c);
    for (std::size_t i = 0; i < n_; ++i) values[reg_->state_var(i)] = x[i];
    for (std::size_t j = 0; j < m_; ++j) values[reg_->input_var(j, 0)] = u[j];
    auto guard = [this](double den) {
        if (!(std::abs(den) >= pole_guard)) throw PoleError(0, "denominator within the pole guard");
    };
    std::vector<S> out;
    out.reserve(n_);
    if (!exprs_.empty()) {
        auto value = [&](std::size_t v) { return values[v]; };
        auto divide = [&](const S& a, const S& b) {
            guard(value_of(b));
            return a / b;
        };
        for (const auto& e : exprs_) out.push_back(eval_expr<S>(*e, value, divide));
    } else {
        for (const auto& f : rational_) {
            S num = eval_poly(f.num(), values);
            if (f.is_polynomial()) {
                out.push_back(num);
                continue;
            }
            S den = eval_poly(f.den(), values);
            guard(value_of(den));
            out.push_back(num / den);
        }
    }
    return out;
}

std::vector<double> NumericMap::step(const std::vector<double>& x, const std::vector<double>& u) const {
    return apply<double>(x, u);
}

NumericMap::Linearization NumericMap::linearize(const std::vector<double>& x, const std::vector<double>& u) const {
    const std::size_t dim = n_ + m_;
    std::vector<Jet> jx, ju;
    for (std::size_t i = 0; i < n_; ++i) jx.emplace_back(x[i], dim, i);
    for (std::size_t j = 0; j < m_; ++j) ju.emplace_back(u[j], dim, n_ + j);
    std::vector<Jet> out = apply<Jet>(jx, ju);
    Linearization lin{std::vector<double>(n_), Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_)),
                      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(m_))};
    for (std::size_t i = 0; i < n_; ++i) {
        lin.next[i] = out[i].v;
        const auto& d = out[i].d;
        for (std::size_t c = 0; c < d.size(); ++c) {
            const auto r = static_cast<Eigen::Index>(i);
            if (c < n_) {
                lin.A(r, static_cast<Eigen::Index>(c)) = d[c];
            } else {
                lin.B(r, static_cast<Eigen::Index>(c - n_)) = d[c];
            }
        }
    }
    return lin;
}

Trajectory simulate(const NumericMap& map, const std::vector<double>& x0,
                    const std::vector<std::vector<double>>& inputs) {
    require_inputs(map, x0, inputs);
    Trajectory tr{{x0}, inputs};
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        try {
            tr.x.push_back(map.step(tr.x.back(), inputs[t]));
        } catch (const PoleError&) {
            throw PoleError(t, "pole at step " + std::to_string(t));
        }
    }
    return tr;
}

namespace {

// Calls visit(j, M_j) for j = 1..k along the trajectory.
template <class Visit>
void access_chain(const NumericMap& map, const std::vector<double>& x0, const std::vector<std::vector<double>>& inputs,
                  Visit&& visit) {
    const auto n = static_cast<Eigen::Index>(map.n());
    const auto m = static_cast<Eigen::Index>(map.m());
    std::vector<double> x = x0;
    Eigen::MatrixXd M(n, 0);
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        NumericMap::Linearization lin;
        try {
            lin = map.linearize(x, inputs[t]);
        } catch (const PoleError&) {
            throw PoleError(t, "pole at step " + std::to_string(t));
        }
        Eigen::MatrixXd next(n, M.cols() + m);
        if (M.cols() > 0) next.leftCols(M.cols()) = lin.A * M;
        next.rightCols(m) = lin.B;
        M = std::move(next);
        x = std::move(lin.next);
        visit(static_cast<int>(t) + 1, M);
    }
}

} // namespace

Eigen::MatrixXd numeric_access_matrix(const NumericMap& map, const std::vector<double>& x0,
                                      const std::vector<std::vector<double>>& inputs) {
    require_inputs(map, x0, inputs);
    if (inputs.empty()) throw std::invalid_argument("numeric_access_matrix: k must be positive");
    Eigen::MatrixXd out;
    access_chain(map, x0, inputs, [&](int, const Eigen::MatrixXd& M) { out = M; });
    return out;
}

Eigen::MatrixXd finite_difference_access_matrix(const NumericMap& map, const std::vector<double>& x0,
                                                const std::vector<std::vector<double>>& inputs, double h) {
    require_inputs(map, x0, inputs);
    const std::size_t k = inputs.size(), m = map.m(), n = map.n();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k * m));
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t j = 0; j < m; ++j) {
            auto plus = inputs, minus = inputs;
            const double step = h * std::max(1.0, std::abs(inputs[t][j]));
            plus[t][j] += step;
            minus[t][j] -= step;
            const auto xp = simulate(map, x0, plus).x.back();
            const auto xm = simulate(map, x0, minus).x.back();
            for (std::size_t i = 0; i < n; ++i)
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t * m + j)) = (xp[i] - xm[i]) / (2 * step);
        }
    }
    return out;
}

RankEstimate jacobian_rank(const NumericMap& map, const std::vector<double>& x0, int k, const RankOptions& options) {
    if (k < 1) throw std::invalid_argument("jacobian_rank: k must be positive");
    if (options.samples < 1) throw std::invalid_argument("jacobian_rank: at least one sample is required");
    if (x0.size() != map.n()) throw std::invalid_argument("jacobian_rank: initial state has the wrong dimension");
    const std::size_t kk = static_cast<std::size_t>(k), m = map.m();
    const std::size_t full = std::min(map.n(), kk * m);

    std::vector<std::vector<std::vector<double>>> trials;
    trials.emplace_back(kk, std::vector<double>(m, 0.0));
    for (std::size_t t = 0; t < kk; ++t)
        for (std::size_t j = 0; j < m; ++j) {
            auto u = trials.front();
            u[t][j] = 1.0;
            trials.push_back(std::move(u));
        }
    std::mt19937_64 rng(options.seed);
    for (int s = 0; s < options.samples; ++s)
        trials.push_back(random_inputs(rng, kk, m, options.box_lo, options.box_hi));

    RankEstimate best;
    bool any = false;
    for (const auto& u : trials) {
        ++best.samples;
        Eigen::MatrixXd M;
        try {
            M = numeric_access_matrix(map, x0, u);
        } catch (const PoleError&) {
            ++best.pole_samples;
            continue;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
        const Eigen::VectorXd& sv = svd.singularValues();
        const double top = sv.size() > 0 ? sv(0) : 0.0;
        const double tol = options.tol * top;
        std::size_t rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (top > 0 && sv(i) > tol) ++rank;
        if (!any || rank > best.rank) {
            any = true;
            best.rank = rank;
            best.tolerance = tol;
            best.singular_values.assign(sv.data(), sv.data() + sv.size());
            best.best_inputs = u;
        }
        if (best.rank == full) break;
    }
    if (!any) throw PoleError(0, "jacobian_rank: every input sample hit a pole");
    return best;
}

ScanResult grid_scan_1d(const NumericMap& map, const ScanOptions& options) {
    if (map.n() != 1) throw std::invalid_argument("grid_scan_1d: the map must have one state");
    if (options.k < 1 || options.samples < 1 || !(options.step > 0) || options.hi < options.lo)
        throw std::invalid_argument("grid_scan_1d: invalid scan options");
    ScanResult res;
    res.flagged.resize(static_cast<std::size_t>(options.k));
    const auto points = static_cast<long>(std::llround((options.hi - options.lo) / options.step));
    std::mt19937_64 rng(options.seed);
    for (long i = 0; i <= points; ++i) {
        const double x0 = i == points ? options.hi : options.lo + static_cast<double>(i) * options.step;
        res.grid.push_back(x0);
        // largest[j - 1]: maximum |d x(j) / d u(.)| seen over the samples.
        std::vector<double> largest(static_cast<std::size_t>(options.k), 0.0);
        for (int s = 0; s < options.samples; ++s) {
            auto u = random_inputs(rng, static_cast<std::size_t>(options.k), map.m(), options.input_lo, options.input_hi);
            try {
                access_chain(map, {x0}, u, [&](int j, const Eigen::MatrixXd& M) {
                    double& l = largest[static_cast<std::size_t>(j - 1)];
                    l = std::max(l, M.cwiseAbs().maxCoeff());
                });
            } catch (const PoleError&) {
                continue;
            }
        }
        bool quiet = true;
        for (int j = 1; j <= options.k; ++j) {
            quiet = quiet && largest[static_cast<std::size_t>(j - 1)] < options.threshold;
            if (quiet) res.flagged[static_cast<std::size_t>(j - 1)].push_back(x0);
        }
    }
    return res;
}

} // namespace raccess
