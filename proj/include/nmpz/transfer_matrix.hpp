#pragma once

#include "nmpz/rational.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace nmpz {

/// Dense rectangular matrix of rational functions in s.
class TransferMatrix {
public:
    TransferMatrix(int rows, int cols);
    static TransferMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    RationalFunction& at(int r, int c) { return entries_[size_t(r) * cols_ + c]; }
    const RationalFunction& at(int r, int c) const { return entries_[size_t(r) * cols_ + c]; }

    TransferMatrix operator*(const TransferMatrix& o) const;
    TransferMatrix operator+(const TransferMatrix& o) const;
    TransferMatrix operator*(const RationalFunction& g) const;

private:
    int rows_, cols_;
    std::vector<RationalFunction> entries_;
};

/// Entry-wise evaluation at s. Throws, naming the entry, if s is a pole.
Eigen::MatrixXcd tm_eval(const TransferMatrix& M, Complex s);

/// Exact rational determinant and inverse for square matrices of dimension
/// <= 8. Entries are first put over per-row common denominators so the
/// expansion itself runs on polynomials only; the inverse entries carry the
/// determinant numerator as their common denominator.
std::pair<RationalFunction, TransferMatrix> tm_det_inv(const TransferMatrix& M);

/// Determinant only (same expansion, no adjugate).
RationalFunction tm_det(const TransferMatrix& M);

struct ClosedLoopPole {
    Complex value;
    bool cancellation_suspect = false; // coincides with a cleared-denominator root
};

struct ClosedLoopResult {
    std::vector<ClosedLoopPole> poles; // descending real part
    /// Root of maximal real part among non-suspect poles.
    Complex dominant;
};

/// Poles of T = L(I+L)^{-1}: roots of the numerator of det(I + L(s)) after
/// clearing denominators. Roots coinciding (1e-6 relative) with denominator
/// roots are flagged as potential cancellations but still reported; the
/// dominant mode is selected among the unflagged ones.
ClosedLoopResult closed_loop_poles(const TransferMatrix& L);

} // namespace nmpz
