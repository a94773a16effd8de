#pragma once

#include "nmpz/poly.hpp"

namespace nmpz {

/// Ratio of two polynomials. No pole-zero cancellation is ever performed on
/// the stored representation; cancellation detection happens only at
/// reporting time. The denominator is never the zero polynomial.
class RationalFunction {
public:
    RationalFunction();                   // 0/1
    RationalFunction(Polynomial num, Polynomial den);
    static RationalFunction constant(Complex c);
    static RationalFunction from(Complex c) { return constant(c); }

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    /// Evaluate at s. Throws if s is a pole (relative denominator magnitude
    /// below 1e-12).
    Complex eval(Complex s) const;
    bool is_pole(Complex s) const;

    RationalFunction operator+(const RationalFunction& o) const;
    RationalFunction operator-(const RationalFunction& o) const;
    RationalFunction operator*(const RationalFunction& o) const;
    RationalFunction operator/(const RationalFunction& o) const;
    RationalFunction operator-() const;

private:
    Polynomial num_, den_;
};

} // namespace nmpz
