#include "nmpz/network.hpp"

#include "nmpz/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace nmpz {

namespace {
constexpr double kPsdRel = 1e-8;
}

Eigen::MatrixXd principal_sqrt_psd(const Eigen::MatrixXd& A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
    if (es.info() != Eigen::Success) fail_numerical("principal_sqrt_psd: eigendecomposition failed");
    Eigen::VectorXd lam = es.eigenvalues();
    const double lmax = std::max(lam.maxCoeff(), 0.0);
    for (int i = 0; i < lam.size(); ++i) {
        if (lam(i) < -kPsdRel * std::max(lmax, 1.0))
            fail_numerical("principal_sqrt_psd: matrix is not positive semidefinite (eigenvalue " +
                           std::to_string(lam(i)) + ")");
        lam(i) = std::sqrt(std::max(lam(i), 0.0));
    }
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

ReducedNetwork build_reduced(const GridModel& model) {
    if (model.omega0 <= 0.0) fail_input("build_reduced: omega0 must be positive");
    std::unordered_map<std::string, int> index;
    for (size_t i = 0; i < model.buses.size(); ++i) {
        if (!index.emplace(model.buses[i].id, int(i)).second)
            fail_input("build_reduced: duplicate bus id '" + model.buses[i].id + "'");
    }

    const int nb = int(model.buses.size());
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nb, nb);
    for (const Branch& br : model.branches) {
        auto f = index.find(br.from);
        auto t = index.find(br.to);
        if (f == index.end() || t == index.end())
            fail_input("build_reduced: branch endpoint '" + (f == index.end() ? br.from : br.to) +
                       "' is not a bus");
        if (!(br.x_pu > 0.0))
            fail_input("build_reduced: branch " + br.from + "-" + br.to + " needs x_pu > 0");
        const double b = 1.0 / br.x_pu;
        const int i = f->second, j = t->second;
        B(i, i) += b;
        B(j, j) += b;
        B(i, j) -= b;
        B(j, i) -= b;
    }

    // Ground the slack buses (row/column deletion), then Schur-eliminate the
    // interior block over the converter nodes.
    std::vector<int> conv, interior;
    for (int i = 0; i < nb; ++i) {
        switch (model.buses[i].role) {
            case BusRole::Converter: conv.push_back(i); break;
            case BusRole::Interior: interior.push_back(i); break;
            case BusRole::Slack: break;
        }
    }
    if (conv.empty()) fail_input("build_reduced: at least one converter bus required");

    const int nc = int(conv.size()), ni = int(interior.size());
    Eigen::MatrixXd Bcc(nc, nc), Bci(nc, ni), Bic(ni, nc), Bii(ni, ni);
    for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b) Bcc(a, b) = B(conv[a], conv[b]);
    for (int a = 0; a < nc; ++a)
        for (int b = 0; b < ni; ++b) Bci(a, b) = B(conv[a], interior[b]);
    for (int a = 0; a < ni; ++a)
        for (int b = 0; b < nc; ++b) Bic(a, b) = B(interior[a], conv[b]);
    for (int a = 0; a < ni; ++a)
        for (int b = 0; b < ni; ++b) Bii(a, b) = B(interior[a], interior[b]);

    Eigen::MatrixXd Br = Bcc;
    if (ni > 0) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(Bii);
        if (!lu.isInvertible())
            fail_numerical("build_reduced: interior block is singular, Kron reduction impossible");
        Br = Bcc - Bci * lu.solve(Bic);
    }
    Br = 0.5 * (Br + Br.transpose());

    // Definiteness gate, same tolerance as the square root.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Br);
    const double lmax = std::max(es.eigenvalues().maxCoeff(), 0.0);
    if (es.eigenvalues().minCoeff() < -kPsdRel * std::max(lmax, 1.0))
        fail_numerical("build_reduced: reduced matrix is not PSD within tolerance");

    ReducedNetwork out;
    out.B_r = Br;
    out.omega0 = model.omega0;
    for (int c : conv) out.node_order.push_back(model.buses[c].id);
    return out;
}

OperatingMatrices build_operating_matrices(const ReducedNetwork& net, const OperatingPoint& op) {
    const int n = int(net.node_order.size());
    if (net.B_r.rows() != n || net.B_r.cols() != n)
        fail_input("build_operating_matrices: B_r dimension does not match node order");

    std::unordered_map<std::string, const ConverterState*> by_bus;
    for (const ConverterState& c : op.converters) by_bus[c.bus] = &c;

    OperatingMatrices m;
    m.D.resize(n);
    m.S.resize(n);
    m.P.resize(n);
    m.Q.resize(n);
    m.U_phasor.resize(n);
    for (int i = 0; i < n; ++i) {
        auto it = by_bus.find(net.node_order[i]);
        if (it == by_bus.end())
            fail_input("build_operating_matrices: no operating data for bus '" + net.node_order[i] + "'");
        const ConverterState& c = *it->second;
        if (!(c.U_pu > 0.0))
            fail_input("build_operating_matrices: U must be positive at bus '" + c.bus + "'");
        const Complex S(c.P_pu, c.Q_pu);
        if (std::abs(S) == 0.0)
            fail_input("build_operating_matrices: degenerate injection |S| = 0 at bus '" + c.bus + "'");
        const Complex u = std::polar(c.U_pu, c.theta_rad);
        m.U_phasor(i) = u;
        m.S(i) = S;
        m.P(i) = c.P_pu;
        m.Q(i) = c.Q_pu;
        m.D(i) = u * u / S;
    }
    m.Y = m.U_phasor.asDiagonal() * net.B_r.cast<Complex>() *
          m.U_phasor.conjugate().asDiagonal();
    m.B_half = principal_sqrt_psd(net.B_r);
    return m;
}

} // namespace nmpz
