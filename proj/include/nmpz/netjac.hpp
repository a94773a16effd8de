#pragma once

#include "nmpz/network.hpp"

#include <Eigen/Dense>

#include <complex>

namespace nmpz {

/// Low-pass and quadrature factors of the dynamic network admittance,
///   alpha(s) = omega0^2 / (s^2 + omega0^2),
///   beta(s)  = omega0 s / (s^2 + omega0^2),
/// so that gamma = alpha + j beta = j omega0 / (s + j omega0) is the ratio of
/// dynamic to static inductive admittance (gamma(0) = 1, the static limit).
Complex net_alpha(Complex s, double omega0);
Complex net_beta(Complex s, double omega0);
Complex net_gamma(Complex s, double omega0);
Complex net_alpha_prime(Complex s, double omega0);
Complex net_beta_prime(Complex s, double omega0);

/// Frequency-dependent network Jacobian
///   J_NET(s) = [[a,b],[-b,a]] (x) Re(Y) + [[b,-a],[a,b]] (x) Im(Y)
///              + [[-Q, P],[P, Q]],
/// with rows [dP; dQ] and columns [dtheta; dU/U], plus a constant droop gain
/// matrix K on the Q-U diagonal block: J_sys(s) = J_NET(s) + K.
struct NetworkJacobian {
    int N = 0;
    Eigen::MatrixXcd Y;
    Eigen::VectorXd P, Q;
    double omega0 = 0.0;
    Eigen::VectorXd droop; // K_ii at (N+i, N+i); zero by default

    static NetworkJacobian from(const OperatingMatrices& m, double omega0);
};

/// Kronecker-structured assembly of J_sys(s) = J_NET(s) + K.
/// Throws at s = +-j*omega0 (poles of alpha, beta).
Eigen::MatrixXcd assemble_jnet(const NetworkJacobian& jac, Complex s);

/// Same matrix built per 2x2 node-pair block from the scalar cross-coupling
/// formulas; retained permanently as an independent verification path.
Eigen::MatrixXcd assemble_jnet_blocks(const NetworkJacobian& jac, Complex s);

/// Real fast path for real s (the determinant scan axis).
Eigen::MatrixXd assemble_jnet_real(const NetworkJacobian& jac, double s);

/// Analytic d/ds of J_sys at s.
Eigen::MatrixXcd djnet_ds(const NetworkJacobian& jac, Complex s);

/// Returns a copy with `gain` added to the droop entry of `node`.
NetworkJacobian apply_droop(const NetworkJacobian& jac, int node, double gain);

/// W J W^{-1} with W = (1/sqrt(2)) [[1, j],[1, -j]] (x) I_N.
Eigen::MatrixXcd similarity_w(const Eigen::MatrixXcd& J);

/// Closed block form [[conj(gamma) Y, jS],[-j conj(S), gamma conj(Y)]] that
/// similarity_w(J_NET(s)) must reproduce when the droop is zero.
Eigen::MatrixXcd similarity_blocks(const NetworkJacobian& jac, Complex s);

} // namespace nmpz
