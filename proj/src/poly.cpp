#include "nmpz/poly.hpp"

#include "nmpz/error.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace nmpz {


Polynomial::Polynomial(std::initializer_list<Complex> ascending) : coeffs_(ascending) { trim(); }

Polynomial::Polynomial(std::vector<Complex> ascending) : coeffs_(std::move(ascending)) { trim(); }

Polynomial Polynomial::constant(Complex c) { return Polynomial({c}); }

Polynomial Polynomial::from_roots(const std::vector<Complex>& roots, Complex scale) {
    Polynomial p = constant(scale);
    for (Complex r : roots) p = p * Polynomial({-r, 1.0});
    return p;
}

void Polynomial::trim() {
    // Exact zeros only: a relative threshold would discard genuine small
    // leading coefficients when the coefficient range is wide, silently
    // changing the polynomial. Cancellation in this codebase produces exact
    // zeros (identical products subtracted), which this does catch.
    while (!coeffs_.empty() && std::abs(coeffs_.back()) == 0.0) coeffs_.pop_back();
}

double Polynomial::coeff_norm() const {
    double s = 0.0;
    for (const Complex& c : coeffs_) s += std::norm(c);
    return std::sqrt(s);
}

Complex Polynomial::eval(Complex s) const {
    Complex acc(0.0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

double Polynomial::eval_magnitude_bound(Complex s) const {
    double acc = 0.0;
    const double m = std::abs(s);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * m + std::abs(*it);
    return acc;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    std::vector<Complex> out(std::max(coeffs_.size(), o.coeffs_.size()), Complex(0));
    for (size_t i = 0; i < coeffs_.size(); ++i) out[i] += coeffs_[i];
    for (size_t i = 0; i < o.coeffs_.size(); ++i) out[i] += o.coeffs_[i];
    return Polynomial(std::move(out));
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator-() const {
    std::vector<Complex> out = coeffs_;
    for (Complex& c : out) c = -c;
    return Polynomial(std::move(out));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (is_zero() || o.is_zero()) return Polynomial();
    std::vector<Complex> out(coeffs_.size() + o.coeffs_.size() - 1, Complex(0));
    for (size_t i = 0; i < coeffs_.size(); ++i)
        for (size_t j = 0; j < o.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * o.coeffs_[j];
    return Polynomial(std::move(out));
}

Polynomial Polynomial::operator*(Complex c) const {
    std::vector<Complex> out = coeffs_;
    for (Complex& x : out) x *= c;
    return Polynomial(std::move(out));
}

namespace {

// Parlett-Reinsch style diagonal balancing by powers of two; brings the
// row and column norms of each index together without rounding error.
void balance_companion(Eigen::MatrixXcd& M) {
    const int n = int(M.rows());
    const double gamma = 0.9;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            double row_norm = 0.0, col_norm = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                row_norm += std::abs(M(i, j));
                col_norm += std::abs(M(j, i));
            }
            if (row_norm == 0.0 || col_norm == 0.0) continue;
            int exponent = 0;
            std::frexp(row_norm / col_norm, &exponent);
            exponent /= 2;
            if (exponent == 0) continue;
            const double scaled_col = std::ldexp(col_norm, exponent);
            const double scaled_row = std::ldexp(row_norm, -exponent);
            if (scaled_col + scaled_row < gamma * (col_norm + row_norm)) {
                changed = true;
                M.row(i) *= std::ldexp(1.0, -exponent);
                M.col(i) *= std::ldexp(1.0, exponent);
            }
        }
    }
}

} // namespace

std::vector<Complex> poly_roots(const Polynomial& p) {
    if (p.is_zero() || p.degree() == 0)
        fail_input("poly_roots: no roots (zero polynomial or degree 0)");
    const auto& c = p.coefficients();
    const int n = p.degree();

    // Monic companion matrix, balanced by diagonal powers of two. The
    // balancing carries the conditioning burden: coefficient rescaling in s
    // underflows the low-order monic coefficients once the root spread
    // reaches the Table-style three-decade gain ranges.
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        if (k + 1 < n) companion(k + 1, k) = 1.0;
        companion(k, n - 1) = -c[size_t(k)] / c[size_t(n)];
    }
    balance_companion(companion);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) fail_numerical("poly_roots: companion eigensolve failed");

    std::vector<Complex> roots(n);
    for (int k = 0; k < n; ++k) roots[k] = es.eigenvalues()(k);
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return roots;
}

double root_residual(const Polynomial& p, Complex r) {
    return std::abs(p.eval(r)) / std::max(1.0, p.coeff_norm());
}

} // namespace nmpz
