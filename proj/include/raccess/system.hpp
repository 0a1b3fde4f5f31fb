#pragma once

// Discrete-time rational systems x(t+1) = phi(x(t), u(t)): forward shifts,
// the Jacobians A and B, the access matrices M_k and the coefficient ideals
// extracted from their maximal minors.

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "raccess/groebner.hpp"
#include "raccess/poly.hpp"

namespace raccess {

struct RFMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<RationalFunction> data;  // row-major

    RFMatrix() = default;
    RFMatrix(std::size_t r, std::size_t c, const RationalFunction& fill);

    RationalFunction& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const RationalFunction& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

class SystemModel {
public:
    SystemModel() = default;
    /// `phi[i]` is the update of state i; it may use parameters, states and
    /// inputs at time 0 only. Throws std::invalid_argument otherwise.
    SystemModel(std::string name, RegistryPtr reg, std::vector<RationalFunction> phi);

    const std::string& name() const noexcept { return name_; }
    std::size_t n() const noexcept { return phi_.size(); }
    std::size_t m() const;
    const std::vector<RationalFunction>& phi() const noexcept { return phi_; }

    /// Registry with inputs at time 0 only (horizon 1); phi lives here.
    const RegistryPtr& registry() const noexcept { return reg_; }
    /// Registry with inputs u(0..horizon-1). horizon 0 is the state ring used by ideals.
    RegistryPtr registry(int horizon) const;
    RegistryPtr state_registry() const { return registry(0); }

    /// Substitutes rational parameter values; the bound parameters leave the registry.
    SystemModel bind(const std::map<std::string, Rational>& values) const;

private:
    struct Registries {
        std::mutex mu;
        std::map<int, RegistryPtr> by_horizon;
    };

    std::string name_;
    RegistryPtr reg_;
    std::vector<RationalFunction> phi_;
    std::shared_ptr<Registries> regs_;
};

/// Moves a polynomial between registries that declare the same names
/// (variables are matched by name; unknown names throw).
Polynomial remap(const Polynomial& p, const RegistryPtr& target);
RationalFunction remap(const RationalFunction& f, const RegistryPtr& target);

/// t-fold forward shift: x <- phi(x, u(0)) and u(s) <- u(s+1), iterated.
/// The result lives over the registry with horizon (input horizon of f) + t.
RationalFunction shift(const RationalFunction& f, const SystemModel& sys, int t);

struct Jacobians {
    RFMatrix A;  // d phi / d x, n x n
    RFMatrix B;  // d phi / d u(0), n x m
};

Jacobians jacobians(const SystemModel& sys);

struct AccessMatrix {
    int k = 0;
    RFMatrix entries;  // n x (k m), over sys.registry(k)
};

/// Incrementally builds M_1, M_2, ... and the symbolic states x(t), reusing
/// earlier horizons.
class AccessMatrixBuilder {
public:
    explicit AccessMatrixBuilder(SystemModel sys);
    /// Trajectory from the fixed state x0; entries depend on params and inputs only.
    /// Throws DegeneracyError when a denominator vanishes identically along the way.
    AccessMatrixBuilder(SystemModel sys, const std::vector<Rational>& x0);

    const SystemModel& system() const noexcept { return sys_; }
    const AccessMatrix& matrix(int k);
    /// x(t) as rational functions of x(0) (or the fixed start) and u(0..t-1).
    const std::vector<RationalFunction>& state(int t);

private:
    SystemModel sys_;
    Jacobians jac_;
    std::vector<std::vector<RationalFunction>> states_;
    std::vector<AccessMatrix> mats_;
    bool identity_ = true;
};

AccessMatrix build_M(const SystemModel& sys, int k);

struct Minor {
    std::vector<std::size_t> columns;
    /// Numerator of the reduced minor, over the registry of M_k.
    Polynomial numerator;
    /// Input monomial b (over the registry of M_k) -> coefficient a(params, x).
    std::vector<std::pair<Monomial, Polynomial>> coefficients;
};

struct MinorDecomposition {
    int k = 0;
    RegistryPtr registry;
    std::vector<Minor> minors;
    /// Distinct square-free denominator factors met in M_k.
    std::vector<Polynomial> excluded_locus;

    /// Some minor is not identically zero.
    bool full_rank() const;
};

/// All n x n minors, in lexicographic order of their column sets.
MinorDecomposition minors_and_coefficients(const AccessMatrix& M);

/// Ideal of all coefficients a, over sys.state_registry().
Ideal coefficient_ideal(const MinorDecomposition& dec, const SystemModel& sys);

/// Determinant by fraction-free elimination.
Polynomial bareiss_determinant(std::vector<std::vector<Polynomial>> rows);

/// Some maximal minor is not identically zero (exact).
bool generic_full_rank(const RFMatrix& M);

bool submersivity_check(const SystemModel& sys);

/// Some factor of the locus vanishes at x0 for every input (params kept symbolic).
bool on_excluded_locus(const std::vector<Polynomial>& locus, const std::vector<Rational>& x0);

} // namespace raccess
