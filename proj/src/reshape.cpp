#include "nmpz/reshape.hpp"

#include "nmpz/error.hpp"
#include "nmpz/zerocalc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nmpz {

namespace {

// Shifted inverse-iteration polish toward the null direction; two steps
// recover full accuracy from the O(sqrt(eps)) eigensolver vectors. Each
// iterate is kept only if it lowers the null residual ||A v||.
Eigen::VectorXcd polish_null(const Eigen::MatrixXcd& A, Eigen::VectorXcd v, Complex shift) {
    v /= v.norm();
    Eigen::MatrixXcd As = A;
    As.diagonal().array() -= shift;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(As);
    Eigen::VectorXcd best = v;
    double best_res = (A * v).norm();
    Eigen::VectorXcd w = v;
    for (int it = 0; it < 2; ++it) {
        w = lu.solve(w);
        const double nw = w.norm();
        if (!std::isfinite(nw) || nw == 0.0) break;
        w /= nw;
        const double res = (A * w).norm();
        if (res < best_res) {
            best = w;
            best_res = res;
        }
        if (res < 1e-12 * A.norm()) break;
    }
    return best;
}

void rotate_first_nonzero_positive(Eigen::VectorXcd& v) {
    for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-8 * v.norm()) {
            v *= std::conj(v(i)) / std::abs(v(i));
            return;
        }
    }
}

bool re_y_positive_definite(const Eigen::MatrixXcd& Y) {
    const Eigen::MatrixXd G = 0.5 * (Y.real() + Y.real().transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    return es.eigenvalues().minCoeff() > 0.0;
}

} // namespace

ReshapingReport participation_factors(const NetworkJacobian& jac, double z0) {
    const int n = jac.N;
    const Eigen::MatrixXcd J = assemble_jnet(jac, Complex(z0, 0.0));

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(J);
    if (es.info() != Eigen::Success) fail_numerical("participation_factors: eigensolve failed");

    std::vector<int> idx(2 * n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return std::abs(es.eigenvalues()(a)) < std::abs(es.eigenvalues()(b));
    });
    const double l0 = std::abs(es.eigenvalues()(idx[0]));
    const double l1 = std::abs(es.eigenvalues()(idx[1]));
    if (l1 < 10.0 * l0)
        fail_numerical("participation_factors: zero eigenvalue not isolated (|lambda| = " +
                       std::to_string(l0) + ", next " + std::to_string(l1) + ")");

    Eigen::VectorXcd r = polish_null(J, es.eigenvectors().col(idx[0]), es.eigenvalues()(idx[0]));
    rotate_first_nonzero_positive(r);

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> esl(J.adjoint());
    if (esl.info() != Eigen::Success) fail_numerical("participation_factors: adjoint eigensolve failed");
    int lmin = 0;
    for (int i = 1; i < 2 * n; ++i)
        if (std::abs(esl.eigenvalues()(i)) < std::abs(esl.eigenvalues()(lmin))) lmin = i;
    Eigen::VectorXcd l = polish_null(J.adjoint(), esl.eigenvectors().col(lmin), esl.eigenvalues()(lmin));

    const Complex c = (l.adjoint() * r)(0);
    if (std::abs(c) < 1e-12)
        fail_numerical("participation_factors: left/right eigenvectors nearly orthogonal");
    l /= std::conj(c); // now l^H r = 1

    ReshapingReport rep;
    rep.z0 = z0;
    rep.l = l;
    rep.r = r;
    rep.p.resize(n);
    for (int i = 0; i < n; ++i) rep.p(i) = std::conj(l(n + i)) * r(n + i);
    rep.passivity_gate = re_y_positive_definite(jac.Y);
    return rep;
}

Sensitivity zero_sensitivity(const NetworkJacobian& jac, double z0, int node) {
    if (node < 0 || node >= jac.N) fail_input("zero_sensitivity: node index out of range");
    ReshapingReport rep = participation_factors(jac, z0);
    const Eigen::MatrixXcd Jp = djnet_ds(jac, Complex(z0, 0.0));
    const Complex denom = (rep.l.adjoint() * Jp * rep.r)(0);
    if (std::abs(denom) < 1e-12 * Jp.norm())
        fail_numerical("zero_sensitivity: defective zero, d(det)/ds vanishes");
    const Complex S_sys = -1.0 / denom;
    return {rep.p(node) * S_sys, S_sys};
}

ReshapingReport rank_nodes(const NetworkJacobian& jac, double z0) {
    ReshapingReport rep = participation_factors(jac, z0);
    const Eigen::MatrixXcd Jp = djnet_ds(jac, Complex(z0, 0.0));
    const Complex denom = (rep.l.adjoint() * Jp * rep.r)(0);
    if (std::abs(denom) < 1e-12 * Jp.norm())
        fail_numerical("rank_nodes: defective zero, d(det)/ds vanishes");
    rep.S_sys = -1.0 / denom;
    rep.dz_dk.resize(jac.N);
    for (int i = 0; i < jac.N; ++i) rep.dz_dk(i) = rep.p(i) * rep.S_sys;

    rep.ranking.resize(jac.N);
    std::iota(rep.ranking.begin(), rep.ranking.end(), 0);
    std::stable_sort(rep.ranking.begin(), rep.ranking.end(), [&](int a, int b) {
        return rep.p(a).real() > rep.p(b).real();
    });
    return rep;
}

UniformGainReport uniform_gain_check(const NetworkJacobian& jac, double z0) {
    const int n = jac.N;
    ReshapingReport rep = rank_nodes(jac, z0);

    UniformGainReport out;
    out.S_sys = rep.S_sys;
    out.passivity_gate = rep.passivity_gate;

    Complex psum = 0.0;
    for (int i = 0; i < n; ++i) psum += rep.p(i);
    out.analytic_uniform = (psum * rep.S_sys).real();

    // Central finite-difference oracle with a uniform droop increment.
    const double delta = 1e-4;
    NetworkJacobian plus = jac, minus = jac;
    for (int i = 0; i < n; ++i) {
        plus.droop(i) += delta;
        minus.droop(i) -= delta;
    }
    const auto zp = refine_root_near(plus, z0);
    const auto zm = refine_root_near(minus, z0);
    if (zp && zm) {
        out.fd_uniform = (*zp - *zm) / (2.0 * delta);
        out.fd_agreement_rel =
            std::abs(out.analytic_uniform - out.fd_uniform) / std::max(std::abs(out.fd_uniform), 1e-30);
        out.agreement_within_1pct = out.fd_agreement_rel <= 0.01;
    } else {
        out.fd_uniform = std::numeric_limits<double>::quiet_NaN();
    }

    // Independent eigenvalue route: d lambda/dk of
    // S^-1 (Y + kI) conj(S)^-1 (conj(Y) + kI) at k = 0, branch nearest the
    // zero, mapped through 2 z0 dz0/dk = omega0^2 d lambda/dk.
    Eigen::VectorXcd Sv(n), Sc(n);
    for (int i = 0; i < n; ++i) {
        Sv(i) = Complex(jac.P(i), jac.Q(i));
        Sc(i) = std::conj(Sv(i));
    }
    Eigen::VectorXcd Sinv = Sv.cwiseInverse(), Scinv = Sc.cwiseInverse();
    const Eigen::MatrixXcd M =
        Sinv.asDiagonal() * jac.Y * Scinv.asDiagonal() * jac.Y.conjugate();
    const Eigen::MatrixXcd dM = Sinv.asDiagonal() * (Scinv.asDiagonal() * jac.Y.conjugate()).eval() +
                                (Sinv.asDiagonal() * jac.Y).eval() * Scinv.asDiagonal();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M);
    const double lam_target = 1.0 + (z0 / jac.omega0) * (z0 / jac.omega0);
    int jbr = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(es.eigenvalues()(i) - lam_target) < std::abs(es.eigenvalues()(jbr) - lam_target))
            jbr = i;
    const Eigen::VectorXcd v = es.eigenvectors().col(jbr);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> esa(M.adjoint());
    int jl = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(esa.eigenvalues()(i) - std::conj(es.eigenvalues()(jbr))) <
            std::abs(esa.eigenvalues()(jl) - std::conj(es.eigenvalues()(jbr))))
            jl = i;
    const Eigen::VectorXcd u = esa.eigenvectors().col(jl);
    const Complex uv = (u.adjoint() * v)(0);
    if (std::abs(uv) > 1e-12) {
        const Complex dlam = (u.adjoint() * dM * v)(0) / uv;
        out.uniform_eig_route = jac.omega0 * jac.omega0 * dlam / (2.0 * z0);
    }

    if (!out.passivity_gate) {
        out.verdict = "passivity precondition unmet";
    } else {
        out.positivity = rep.S_sys.real() > 0.0;
        out.verdict = out.positivity ? "positive" : "negative";
    }
    return out;
}

} // namespace nmpz
