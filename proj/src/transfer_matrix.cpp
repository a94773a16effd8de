#include "nmpz/transfer_matrix.hpp"

#include "nmpz/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace nmpz {

TransferMatrix::TransferMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows <= 0 || cols <= 0) fail_input("TransferMatrix: dimensions must be positive");
    entries_.assign(size_t(rows) * cols, RationalFunction());
}

TransferMatrix TransferMatrix::identity(int n) {
    TransferMatrix I(n, n);
    for (int i = 0; i < n; ++i) I.at(i, i) = RationalFunction::constant(1.0);
    return I;
}

TransferMatrix TransferMatrix::operator*(const TransferMatrix& o) const {
    if (cols_ != o.rows_) fail_input("TransferMatrix: dimension mismatch in product");
    TransferMatrix out(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < o.cols_; ++j) {
            RationalFunction acc;
            for (int k = 0; k < cols_; ++k) acc = acc + at(i, k) * o.at(k, j);
            out.at(i, j) = acc;
        }
    return out;
}

TransferMatrix TransferMatrix::operator+(const TransferMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) fail_input("TransferMatrix: dimension mismatch in sum");
    TransferMatrix out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out.at(i, j) = at(i, j) + o.at(i, j);
    return out;
}

TransferMatrix TransferMatrix::operator*(const RationalFunction& g) const {
    TransferMatrix out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out.at(i, j) = at(i, j) * g;
    return out;
}

Eigen::MatrixXcd tm_eval(const TransferMatrix& M, Complex s) {
    Eigen::MatrixXcd out(M.rows(), M.cols());
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j) {
            if (M.at(i, j).is_pole(s))
                fail_numerical("tm_eval: entry (" + std::to_string(i) + "," + std::to_string(j) +
                               ") has a pole at the evaluation point");
            out(i, j) = M.at(i, j).eval(s);
        }
    return out;
}

namespace {

// Polynomial matrix determinant by Laplace expansion with dynamic
// programming over column subsets. rows_used lists the rows in expansion
// order; dp is indexed by column mask.
Polynomial poly_det(const std::vector<std::vector<Polynomial>>& N, const std::vector<int>& rows_used) {
    const int n = int(rows_used.size());
    const int full = (1 << n) - 1;
    std::vector<Polynomial> dp(size_t(1) << n);
    dp[0] = Polynomial::constant(1.0);
    for (int mask = 1; mask <= full; ++mask) {
        const int k = std::popcount(unsigned(mask)) - 1; // row index within rows_used
        Polynomial acc;
        int pos = 0;
        for (int j = 0; j < n; ++j) {
            if (!(mask & (1 << j))) continue;
            const Polynomial term = N[rows_used[k]][j] * dp[mask & ~(1 << j)];
            acc = ((k + pos) % 2 == 0) ? acc + term : acc - term;
            ++pos;
        }
        dp[mask] = acc;
    }
    return dp[full];
}

struct ClearedForm {
    std::vector<std::vector<Polynomial>> N; // numerators over row common denominators
    std::vector<Polynomial> row_den;        // per-row denominator products
};

// M_ij = n_ij / d_ij  ->  M = diag(1/row_den_i) * N with polynomial N.
ClearedForm clear_rows(const TransferMatrix& M) {
    const int n = M.rows();
    ClearedForm cf;
    cf.N.assign(n, std::vector<Polynomial>(n));
    cf.row_den.assign(n, Polynomial::constant(1.0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) cf.row_den[i] = cf.row_den[i] * M.at(i, j).den();
        for (int j = 0; j < n; ++j) {
            Polynomial others = M.at(i, j).num();
            for (int k = 0; k < n; ++k)
                if (k != j) others = others * M.at(i, k).den();
            cf.N[i][j] = others;
        }
    }
    return cf;
}

void require_square_small(const TransferMatrix& M, const char* op) {
    if (M.rows() != M.cols()) fail_input(std::string(op) + ": matrix must be square");
    if (M.rows() > 8) fail_input(std::string(op) + ": dimension > 8 unsupported by cofactor expansion");
}

} // namespace

RationalFunction tm_det(const TransferMatrix& M) {
    require_square_small(M, "tm_det");
    const int n = M.rows();
    ClearedForm cf = clear_rows(M);
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    Polynomial det_num = poly_det(cf.N, all);
    Polynomial den = Polynomial::constant(1.0);
    for (int i = 0; i < n; ++i) den = den * cf.row_den[i];
    return RationalFunction(det_num, den);
}

std::pair<RationalFunction, TransferMatrix> tm_det_inv(const TransferMatrix& M) {
    require_square_small(M, "tm_det_inv");
    const int n = M.rows();
    ClearedForm cf = clear_rows(M);
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    Polynomial det_N = poly_det(cf.N, all);
    if (det_N.is_zero()) fail_numerical("tm_det_inv: matrix is structurally singular");

    Polynomial den = Polynomial::constant(1.0);
    for (int i = 0; i < n; ++i) den = den * cf.row_den[i];
    RationalFunction det(det_N, den);

    // adj(M)_{ji} = (-1)^{i+j} det(minor_ij(M));
    // inv_{ji} = +- det(minor_ij(N)) * row_den_i / det(N).
    TransferMatrix inv(n, n);
    for (int i = 0; i < n; ++i) {
        std::vector<int> rows;
        for (int r = 0; r < n; ++r)
            if (r != i) rows.push_back(r);
        for (int j = 0; j < n; ++j) {
            std::vector<std::vector<Polynomial>> minor(n - 1, std::vector<Polynomial>(n - 1));
            for (int r = 0; r < n - 1; ++r) {
                int cc = 0;
                for (int c = 0; c < n; ++c) {
                    if (c == j) continue;
                    minor[r][cc++] = cf.N[rows[r]][c];
                }
            }
            std::vector<int> idx(n - 1);
            for (int r = 0; r < n - 1; ++r) idx[r] = r;
            Polynomial md = (n == 1) ? Polynomial::constant(1.0) : poly_det(minor, idx);
            if ((i + j) % 2 != 0) md = -md;
            inv.at(j, i) = RationalFunction(md * cf.row_den[i], det_N);
        }
    }
    return {det, inv};
}

namespace {

bool roots_coincide(Complex a, Complex b) {
    return std::abs(a - b) <= 1e-6 * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace

ClosedLoopResult closed_loop_poles(const TransferMatrix& L) {
    require_square_small(L, "closed_loop_poles");
    const int n = L.rows();
    TransferMatrix IL = TransferMatrix::identity(n) + L;
    RationalFunction det = tm_det(IL);
    if (det.num().is_zero()) fail_numerical("closed_loop_poles: det(I+L) numerator identically zero");
    if (det.num().degree() < 1)
        fail_numerical("closed_loop_poles: det(I+L) numerator has no roots (degenerate loop)");

    std::vector<Complex> roots = poly_roots(det.num());

    // Denominator roots (multiset union over entries) mark cancellation
    // candidates introduced by the common-denominator clearing.
    std::vector<Complex> den_roots;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Polynomial& d = IL.at(i, j).den();
            if (d.degree() >= 1) {
                auto r = poly_roots(d);
                den_roots.insert(den_roots.end(), r.begin(), r.end());
            }
        }

    ClosedLoopResult out;
    bool have_dominant = false;
    for (Complex r : roots) {
        ClosedLoopPole p{r, false};
        for (Complex d : den_roots)
            if (roots_coincide(r, d)) {
                p.cancellation_suspect = true;
                break;
            }
        if (!p.cancellation_suspect &&
            (!have_dominant || r.real() > out.dominant.real())) {
            out.dominant = r;
            have_dominant = true;
        }
        out.poles.push_back(p);
    }
    if (!have_dominant)
        fail_numerical("closed_loop_poles: every root is a cancellation suspect (degenerate loop)");
    return out;
}

} // namespace nmpz
