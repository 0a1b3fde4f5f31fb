#pragma once

// Decision procedures on top of the access matrices: generic accessibility,
// the two ideal chains (kappa with the plain sums, r* with real radicals),
// point-wise membership in S_k and forward invariance of a zero set.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "raccess/groebner.hpp"
#include "raccess/system.hpp"

namespace raccess {

struct ChainStep {
    int k = 0;
    Ideal ideal;
    bool certified = true;
    std::string method;  // radical method for the r* chain, empty otherwise
};

struct ChainResult {
    enum class Status { stabilized, budget_exhausted, not_applicable };

    Status status = Status::not_applicable;
    /// kappa or r*; set only when stabilized.
    std::optional<int> index;
    Ideal ideal;  // last ideal of the chain (the stable one when stabilized)
    std::vector<ChainStep> history;
    /// Conjunction of per-step certifications.
    bool certified = true;
    /// Confirmation was requested and the step after the stable one agreed.
    bool confirmed = false;
    /// An equality was seen and then broken by the next step; the chain went on.
    bool confirmation_broken = false;
};

struct SingularSet {
    enum class Kind { empty, points, generators, entire_space };

    Kind kind = Kind::generators;
    std::vector<RealPoint> points;
    std::vector<Polynomial> generators;
    /// Why points were not listed, when the zero set was not solved.
    std::string note;
};

struct PointVerdict {
    std::vector<Rational> point;
    int k = 0;
    bool in_S_k = false;
    bool undefined = false;
};

struct AnalysisOptions {
    /// 0 selects the default 2n + 4.
    int max_k = 0;
    bool exact_radical = false;
    /// Also compare the stable ideal with the next sum (costs one more M_k).
    bool confirm = false;
};

struct AnalysisReport {
    std::string system;
    std::size_t n = 0;
    std::size_t m = 0;
    bool backward = false;
    bool submersive = false;
    bool generically_accessible = false;
    ChainResult kappa;
    std::optional<ChainResult> r_star;
    SingularSet singular_set;
    std::vector<Polynomial> excluded_locus;
    std::vector<Polynomial> parameter_conditions;
    /// invariance_check of the stable ideal (absent when the chain did not stabilize).
    std::optional<bool> invariant;
    Certification certification = Certification::exact;
};

/// One analysis run over one system; caches matrices, minors and ideals.
class Analyzer {
public:
    explicit Analyzer(SystemModel sys);

    const SystemModel& system() const noexcept { return builder_.system(); }
    int default_max_k() const { return 2 * static_cast<int>(system().n()) + 4; }

    const MinorDecomposition& decomposition(int k);
    /// I_{M_k} over the state registry.
    const Ideal& coefficient_ideal(int k);
    /// Union of denominator factors of phi and of M_1..M_k.
    std::vector<Polynomial> excluded_locus(int k);

    bool submersive();
    bool generically_accessible();

    ChainResult kappa_chain(int max_k, bool confirm = false);
    ChainResult rstar_chain(int max_k);

    PointVerdict point_status(const std::vector<Rational>& x0, int k);

    AnalysisReport analyze(const AnalysisOptions& options);

private:
    AccessMatrixBuilder builder_;
    std::map<int, MinorDecomposition> decs_;
    std::map<int, Ideal> ideals_;
    std::optional<bool> submersive_;
};

bool generic_accessibility(const SystemModel& sys);
ChainResult kappa_chain(const SystemModel& sys, int max_k, bool confirm = false);
ChainResult rstar_chain(const SystemModel& sys, int max_k);
PointVerdict point_status(const SystemModel& sys, const std::vector<Rational>& x0, int k);

/// Phi maps the zero set of I into itself for every input: each input
/// coefficient of the numerator of g(phi) lies in I, for every basis element g.
bool invariance_check(const Ideal& ideal, const SystemModel& sys);

/// Zero set of a state ideal: empty, explicit points, or generators.
SingularSet describe_zero_set(const Ideal& ideal);

AnalysisReport analyze(const SystemModel& sys, const AnalysisOptions& options = {});
/// Forward analysis of a user-supplied time-inverse system, labelled backward.
AnalysisReport backward_analysis(const SystemModel& inverse_sys, const AnalysisOptions& options = {});

/// Polynomial with its state-monomial content and parameter content shown as
/// separate factors, e.g. "x1*(x1 + T*x2)".
std::string factored_string(const Polynomial& p);

} // namespace raccess
