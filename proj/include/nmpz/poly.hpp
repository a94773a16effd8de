#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace nmpz {

using Complex = std::complex<double>;

/// Dense polynomial in s with complex coefficients, stored in ascending
/// powers. Trailing (near-)zero coefficients are trimmed on construction so
/// the leading coefficient of a nonzero polynomial is nonzero. The zero
/// polynomial is the empty coefficient list.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<Complex> ascending);
    explicit Polynomial(std::vector<Complex> ascending);

    static Polynomial constant(Complex c);
    /// Monic polynomial with the given roots, times an optional scale.
    static Polynomial from_roots(const std::vector<Complex>& roots, Complex scale = 1.0);

    bool is_zero() const { return coeffs_.empty(); }
    /// Degree of a nonzero polynomial; -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<Complex>& coefficients() const { return coeffs_; }
    Complex leading() const { return coeffs_.empty() ? Complex(0) : coeffs_.back(); }
    double coeff_norm() const;

    Complex eval(Complex s) const;
    /// Upper bound on |eval| built from coefficient magnitudes; used for
    /// relative pole/zero tests.
    double eval_magnitude_bound(Complex s) const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(Complex c) const;
    Polynomial operator-() const;

    bool operator==(const Polynomial& o) const { return coeffs_ == o.coeffs_; }

private:
    void trim();
    std::vector<Complex> coeffs_;
};

/// All degree(p) roots with multiplicity via the balanced companion-matrix
/// eigenvalue method. Roots are ordered by descending real part, ties by
/// descending imaginary part. Throws for the zero polynomial and degree 0.
std::vector<Complex> poly_roots(const Polynomial& p);

/// Normalized residual |p(r)| / max(1, ||coeffs||); small for good roots.
double root_residual(const Polynomial& p, Complex r);

} // namespace nmpz
