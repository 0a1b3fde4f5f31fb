#pragma once

// Dense univariate polynomials over Q and exact real-root isolation.

#include <cstddef>
#include <string>
#include <vector>

#include "raccess/poly.hpp"

namespace raccess {

class UPoly {
public:
    UPoly() = default;
    /// coeffs[i] multiplies t^i.
    explicit UPoly(std::vector<Rational> coeffs);
    static UPoly constant(const Rational& c);
    static UPoly identity();

    const std::vector<Rational>& coeffs() const noexcept { return c_; }
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const noexcept { return c_.empty(); }
    const Rational& lead() const { return c_.back(); }

    Rational eval(const Rational& t) const;
    double eval_double(double t) const;
    UPoly derivative() const;
    UPoly monic() const;

    friend UPoly operator+(const UPoly& a, const UPoly& b);
    friend UPoly operator-(const UPoly& a, const UPoly& b);
    friend UPoly operator*(const UPoly& a, const UPoly& b);
    UPoly scaled(const Rational& c) const;
    friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }

    /// Euclidean division; divisor must be nonzero.
    void divmod(const UPoly& divisor, UPoly& quotient, UPoly& remainder) const;
    UPoly rem(const UPoly& divisor) const;

    std::string to_string(const std::string& var = "t") const;

private:
    void trim();
    std::vector<Rational> c_;
};

/// Monic gcd (zero if both are zero).
UPoly gcd(const UPoly& a, const UPoly& b);
UPoly square_free_part(const UPoly& p);

/// Real root in (lo, hi), or exactly `lo` when exact is set.
struct RootInterval {
    Rational lo;
    Rational hi;
    bool exact = false;

    Rational midpoint() const { return exact ? lo : Rational((lo + hi) / 2); }
    double approx() const { return midpoint().get_d(); }
};

/// Simplest rational (smallest denominator) in the closed interval [lo, hi].
Rational simplest_rational_between(const Rational& lo, const Rational& hi);

/// Isolates all real roots of a nonzero polynomial (multiplicities ignored),
/// in increasing order. Rational roots are always reported exact.
std::vector<RootInterval> isolate_real_roots(const UPoly& p);

/// Shrinks a non-exact interval below `width` (root of the square-free part of p).
RootInterval refine_root(const UPoly& p, RootInterval root, const Rational& width);

std::size_t count_real_roots(const UPoly& p);

} // namespace raccess
