#include "nmpz/netjac.hpp"

#include "nmpz/error.hpp"

#include <cmath>

namespace nmpz {

namespace {

void check_not_pole(Complex s, double w0) {
    const Complex d = s * s + w0 * w0;
    if (std::abs(d) <= 1e-12 * w0 * w0)
        fail_numerical("assemble_jnet: s at +-j*omega0 is a pole of alpha/beta");
}

} // namespace

Complex net_alpha(Complex s, double w0) { return (w0 * w0) / (s * s + w0 * w0); }

Complex net_beta(Complex s, double w0) { return (w0 * s) / (s * s + w0 * w0); }

Complex net_gamma(Complex s, double w0) { return net_alpha(s, w0) + Complex(0, 1) * net_beta(s, w0); }

Complex net_alpha_prime(Complex s, double w0) {
    const Complex d = s * s + w0 * w0;
    return -2.0 * s * w0 * w0 / (d * d);
}

Complex net_beta_prime(Complex s, double w0) {
    const Complex d = s * s + w0 * w0;
    return w0 * (w0 * w0 - s * s) / (d * d);
}

NetworkJacobian NetworkJacobian::from(const OperatingMatrices& m, double omega0) {
    NetworkJacobian jac;
    jac.N = int(m.S.size());
    jac.Y = m.Y;
    jac.P = m.P;
    jac.Q = m.Q;
    jac.omega0 = omega0;
    jac.droop = Eigen::VectorXd::Zero(jac.N);
    return jac;
}

Eigen::MatrixXcd assemble_jnet(const NetworkJacobian& jac, Complex s) {
    check_not_pole(s, jac.omega0);
    const int n = jac.N;
    const Complex a = net_alpha(s, jac.omega0);
    const Complex b = net_beta(s, jac.omega0);
    const Eigen::MatrixXd G = jac.Y.real();
    const Eigen::MatrixXd B = jac.Y.imag();

    Eigen::MatrixXcd J(2 * n, 2 * n);
    J.topLeftCorner(n, n) = a * G + b * B;
    J.topRightCorner(n, n) = b * G - a * B;
    J.bottomLeftCorner(n, n) = -b * G + a * B;
    J.bottomRightCorner(n, n) = a * G + b * B;
    J.topLeftCorner(n, n) -= jac.Q.asDiagonal().toDenseMatrix().cast<Complex>();
    J.topRightCorner(n, n) += jac.P.asDiagonal().toDenseMatrix().cast<Complex>();
    J.bottomLeftCorner(n, n) += jac.P.asDiagonal().toDenseMatrix().cast<Complex>();
    J.bottomRightCorner(n, n) += jac.Q.asDiagonal().toDenseMatrix().cast<Complex>();
    for (int i = 0; i < n; ++i) J(n + i, n + i) += jac.droop(i);
    return J;
}

Eigen::MatrixXcd assemble_jnet_blocks(const NetworkJacobian& jac, Complex s) {
    check_not_pole(s, jac.omega0);
    const int n = jac.N;
    const Complex a = net_alpha(s, jac.omega0);
    const Complex b = net_beta(s, jac.omega0);

    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // Weighted admittance of the node pair; the self term carries the
            // shunt paths of the reduced network and is purely real.
            const Complex yij = jac.Y(i, j);
            const double re = yij.real(), im = yij.imag();
            Complex blk[2][2] = {{a * re + b * im, b * re - a * im},
                                 {-b * re + a * im, a * re + b * im}};
            if (i == j) {
                blk[0][0] += -jac.Q(i);
                blk[0][1] += jac.P(i);
                blk[1][0] += jac.P(i);
                blk[1][1] += jac.Q(i) + jac.droop(i);
            }
            J(i, j) += blk[0][0];
            J(i, n + j) += blk[0][1];
            J(n + i, j) += blk[1][0];
            J(n + i, n + j) += blk[1][1];
        }
    }
    return J;
}

Eigen::MatrixXd assemble_jnet_real(const NetworkJacobian& jac, double s) {
    const double w0 = jac.omega0;
    const double d = s * s + w0 * w0;
    const double a = w0 * w0 / d;
    const double b = w0 * s / d;
    const int n = jac.N;
    const Eigen::MatrixXd G = jac.Y.real();
    const Eigen::MatrixXd B = jac.Y.imag();

    Eigen::MatrixXd J(2 * n, 2 * n);
    J.topLeftCorner(n, n) = a * G + b * B;
    J.topRightCorner(n, n) = b * G - a * B;
    J.bottomLeftCorner(n, n) = -b * G + a * B;
    J.bottomRightCorner(n, n) = a * G + b * B;
    J.topLeftCorner(n, n) -= jac.Q.asDiagonal().toDenseMatrix();
    J.topRightCorner(n, n) += jac.P.asDiagonal().toDenseMatrix();
    J.bottomLeftCorner(n, n) += jac.P.asDiagonal().toDenseMatrix();
    J.bottomRightCorner(n, n) += jac.Q.asDiagonal().toDenseMatrix();
    for (int i = 0; i < n; ++i) J(n + i, n + i) += jac.droop(i);
    return J;
}

Eigen::MatrixXcd djnet_ds(const NetworkJacobian& jac, Complex s) {
    check_not_pole(s, jac.omega0);
    const int n = jac.N;
    const Complex ap = net_alpha_prime(s, jac.omega0);
    const Complex bp = net_beta_prime(s, jac.omega0);
    const Eigen::MatrixXd G = jac.Y.real();
    const Eigen::MatrixXd B = jac.Y.imag();

    Eigen::MatrixXcd J(2 * n, 2 * n);
    J.topLeftCorner(n, n) = ap * G + bp * B;
    J.topRightCorner(n, n) = bp * G - ap * B;
    J.bottomLeftCorner(n, n) = -bp * G + ap * B;
    J.bottomRightCorner(n, n) = ap * G + bp * B;
    return J;
}

NetworkJacobian apply_droop(const NetworkJacobian& jac, int node, double gain) {
    if (node < 0 || node >= jac.N) fail_input("apply_droop: node index out of range");
    if (!std::isfinite(gain)) fail_input("apply_droop: gain must be finite");
    NetworkJacobian out = jac;
    out.droop(node) += gain;
    return out;
}

Eigen::MatrixXcd similarity_w(const Eigen::MatrixXcd& J) {
    if (J.rows() != J.cols() || J.rows() % 2 != 0)
        fail_input("similarity_w: input must be 2N x 2N");
    const int n = int(J.rows()) / 2;
    const double r = 1.0 / std::sqrt(2.0);
    const Complex j1(0, 1);
    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    Eigen::MatrixXcd Wi = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        W(i, i) = r;
        W(i, n + i) = r * j1;
        W(n + i, i) = r;
        W(n + i, n + i) = -r * j1;
        Wi(i, i) = r;
        Wi(i, n + i) = r;
        Wi(n + i, i) = -r * j1;
        Wi(n + i, n + i) = r * j1;
    }
    return W * J * Wi;
}

Eigen::MatrixXcd similarity_blocks(const NetworkJacobian& jac, Complex s) {
    check_not_pole(s, jac.omega0);
    const int n = jac.N;
    const Complex a = net_alpha(s, jac.omega0);
    const Complex b = net_beta(s, jac.omega0);
    const Complex g = a + Complex(0, 1) * b;
    const Complex gbar = a - Complex(0, 1) * b;
    const Complex j1(0, 1);

    Eigen::VectorXcd S(n);
    for (int i = 0; i < n; ++i) S(i) = Complex(jac.P(i), jac.Q(i));

    Eigen::MatrixXcd out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = gbar * jac.Y;
    out.topRightCorner(n, n) = (j1 * S).asDiagonal();
    out.bottomLeftCorner(n, n) = (-j1 * S.conjugate()).asDiagonal();
    out.bottomRightCorner(n, n) = g * jac.Y.conjugate();
    return out;
}

} // namespace nmpz
