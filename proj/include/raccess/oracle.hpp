#pragma once

// Numeric ground truth: floating-point iteration of the update map, numeric
// access matrices (forward-mode derivatives along the trajectory), sampled
// rank estimates and a grid scan for one-dimensional maps.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "raccess/expr.hpp"
#include "raccess/system.hpp"

namespace raccess {

/// Update map x+ = phi(x, u) with every parameter fixed to a double.
class NumericMap {
public:
    /// Rational system; each parameter must get a value, either here or by
    /// binding the model beforehand.
    static NumericMap from_system(const SystemModel& sys, const std::map<std::string, double>& params = {});
    /// Expression updates over a horizon-1 registry (may be transcendental).
    static NumericMap from_expressions(RegistryPtr reg, std::vector<ExprPtr> updates,
                                       const std::map<std::string, double>& params = {});

    std::size_t n() const noexcept { return n_; }
    std::size_t m() const noexcept { return m_; }

    /// Denominators with magnitude below this raise PoleError.
    double pole_guard = 1e-9;

    std::vector<double> step(const std::vector<double>& x, const std::vector<double>& u) const;

    struct Linearization {
        std::vector<double> next;
        Eigen::MatrixXd A;  // d phi / d x
        Eigen::MatrixXd B;  // d phi / d u
    };
    Linearization linearize(const std::vector<double>& x, const std::vector<double>& u) const;

private:
    NumericMap() = default;
    template <class S>
    std::vector<S> apply(const std::vector<S>& x, const std::vector<S>& u) const;

    RegistryPtr reg_;
    std::size_t n_ = 0, m_ = 0;
    std::vector<RationalFunction> rational_;
    std::vector<ExprPtr> exprs_;
    std::map<std::size_t, double> params_;
};

struct Trajectory {
    std::vector<std::vector<double>> x;       // x(0..k)
    std::vector<std::vector<double>> inputs;  // u(0..k-1)
};

/// Throws PoleError carrying the failing step index.
Trajectory simulate(const NumericMap& map, const std::vector<double>& x0,
                    const std::vector<std::vector<double>>& inputs);

/// M_k at (x0, u(0..k-1)), k = inputs.size(); column block t holds d x(k) / d u(t).
Eigen::MatrixXd numeric_access_matrix(const NumericMap& map, const std::vector<double>& x0,
                                      const std::vector<std::vector<double>>& inputs);

/// Central finite differences of simulate with respect to the inputs.
Eigen::MatrixXd finite_difference_access_matrix(const NumericMap& map, const std::vector<double>& x0,
                                                const std::vector<std::vector<double>>& inputs, double h = 1e-6);

struct RankOptions {
    int samples = 64;
    double tol = 1e-8;  // relative to the largest singular value
    double box_lo = -1.0, box_hi = 1.0;
    std::uint64_t seed = 20240531;
};

struct RankEstimate {
    std::vector<double> singular_values;  // of the best sample
    double tolerance = 0;                 // absolute threshold used for the best sample
    std::size_t rank = 0;
    int samples = 0;          // samples evaluated (structured and random)
    int pole_samples = 0;     // samples skipped at a pole
    std::vector<std::vector<double>> best_inputs;
};

/// Maximum numeric rank of M_k(x0, u) over sampled input sequences: the zero
/// sequence, unit sequences, then uniform samples from the box.
RankEstimate jacobian_rank(const NumericMap& map, const std::vector<double>& x0, int k,
                           const RankOptions& options = {});

struct ScanOptions {
    double lo = 0, hi = 1, step = 0.01;
    double input_lo = -1, input_hi = 1;
    int k = 1;
    int samples = 64;
    double threshold = 1e-6;
    std::uint64_t seed = 20240531;
};

struct ScanResult {
    std::vector<double> grid;
    /// flagged[j - 1]: grid points whose derivatives d x(i) / d u(.) stayed
    /// below the threshold for every i <= j and every sample (estimate of S_j).
    std::vector<std::vector<double>> flagged;
};

ScanResult grid_scan_1d(const NumericMap& map, const ScanOptions& options);

} // namespace raccess
