#pragma once

// Ideals in the state-variable ring with coefficients in Q(parameters):
// reduced Groebner bases, membership, equality, sums, intersections, a
// certified-or-flagged real-radical heuristic and zero-dimensional real
// solving.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "raccess/poly.hpp"

namespace raccess {

struct MonomialOrder {
    enum class Kind { degrevlex, lex };

    Kind kind = Kind::degrevlex;
    /// perm[r] is the state index ranked r-th (rank 0 is the largest variable).
    std::vector<std::size_t> perm;

    static MonomialOrder degrevlex(std::size_t n);
    static MonomialOrder lex(std::size_t n);
    std::string key() const;
};

struct CriticalPair {
    std::size_t i = 0;
    std::size_t j = 0;
    Monomial lcm;
    unsigned sugar = 0;
};

using MonomialCompare = std::function<int(const Monomial&, const Monomial&)>;

/// Chooses the next critical pair to reduce.
class PairSelector {
public:
    virtual ~PairSelector() = default;
    virtual std::size_t select(const std::vector<CriticalPair>& pairs, const MonomialCompare& cmp) const = 0;
};

/// Lowest sugar first, ties broken by the order on lcm, then by indices.
class SugarSelector final : public PairSelector {
public:
    std::size_t select(const std::vector<CriticalPair>& pairs, const MonomialCompare& cmp) const override;
};

/// Smallest lcm first (the "normal" strategy).
class NormalSelector final : public PairSelector {
public:
    std::size_t select(const std::vector<CriticalPair>& pairs, const MonomialCompare& cmp) const override;
};

struct GbOptions {
    unsigned max_degree = 40;
    std::size_t max_pairs = 200000;
    std::shared_ptr<const PairSelector> selector;

    /// Defaults, with max_degree overridden by RACCESS_GB_MAX_DEGREE when set.
    static GbOptions defaults();
};

enum class Certification { exact, heuristic };

class Ideal {
public:
    Ideal() = default;
    /// Generators may use parameters and states only; zero generators are dropped.
    Ideal(RegistryPtr reg, std::vector<Polynomial> generators, Certification cert = Certification::exact);

    static Ideal zero(RegistryPtr reg);
    static Ideal unit(RegistryPtr reg);

    const RegistryPtr& registry() const noexcept { return reg_; }
    const std::vector<Polynomial>& generators() const noexcept { return gens_; }
    Certification certification() const noexcept { return cert_; }
    Ideal with_certification(Certification cert) const;

    /// Reduced basis: each element primitive over Q[params] with positive
    /// leading coefficient, sorted by increasing leading monomial.
    const std::vector<Polynomial>& basis(const MonomialOrder& order) const;
    const std::vector<Polynomial>& basis() const;

    /// Parameter polynomials assumed nonzero while computing the degrevlex basis.
    const std::vector<Polynomial>& parameter_conditions() const;

    bool is_zero() const;
    bool is_unit() const;
    bool uses_parameters() const;
    bool is_zero_dimensional() const;
    /// dim_Q(params) of the quotient ring; nullopt when not zero-dimensional.
    std::optional<std::size_t> quotient_dimension() const;

    /// Reduced basis rendered as "<g1, g2, ...>".
    std::string to_string() const;

    struct Cache;

private:
    friend struct IdealAccess;

    RegistryPtr reg_;
    std::vector<Polynomial> gens_;
    Certification cert_ = Certification::exact;
    std::shared_ptr<Cache> cache_;
};

std::vector<Polynomial> groebner_basis(const Ideal& ideal, const MonomialOrder& order);
std::vector<Polynomial> groebner_basis(const Ideal& ideal, const MonomialOrder& order, const GbOptions& options);

/// Normal form w.r.t. the degrevlex basis, cleared to a primitive polynomial.
Polynomial normal_form(const Ideal& ideal, const Polynomial& p);
bool contains(const Ideal& ideal, const Polynomial& p);
/// J is a subset of I.
bool contains(const Ideal& ideal, const Ideal& sub);
bool ideal_equal(const Ideal& a, const Ideal& b);
Ideal ideal_sum(const Ideal& a, const Ideal& b);
Ideal intersect(const Ideal& a, const Ideal& b);

struct RadicalResult {
    Ideal ideal;
    bool certified = false;
    std::string method;
};

/// J with I contained in J; J is the real radical whenever certified is set.
RadicalResult radical_heuristic(const Ideal& ideal);

/// Radical of a zero-dimensional ideal (Seidenberg); throws if not zero-dimensional.
Ideal zero_dim_radical(const Ideal& ideal);

struct RealCoordinate {
    bool exact = true;
    Rational value;  // exact value, or a rational inside (lo, hi)
    Rational lo, hi;
    double approx() const { return value.get_d(); }
};

using RealPoint = std::vector<RealCoordinate>;

struct SolveResult {
    enum class Status { points, not_zero_dimensional, refused };

    Status status = Status::points;
    std::vector<RealPoint> points;
    std::string explanation;
};

/// All real points of a zero-dimensional ideal, sorted lexicographically by
/// coordinate approximation. Irrational coordinates come as isolating intervals.
SolveResult solve_zero_dim(const Ideal& ideal);

/// Vanishing ideal of finitely many rational points.
Ideal vanishing_ideal(const RegistryPtr& reg, const std::vector<std::vector<Rational>>& points);

} // namespace raccess
