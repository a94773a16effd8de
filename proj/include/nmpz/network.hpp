#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace nmpz {

using Complex = std::complex<double>;

enum class BusRole { Converter, Interior, Slack };

struct Bus {
    std::string id;
    BusRole role = BusRole::Converter;
};

struct Branch {
    std::string from, to;
    double x_pu = 0.0; // per-unit reactance, > 0
};

/// Raw grid data: buses, purely inductive branches, nominal frequency.
struct GridModel {
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    double omega0 = 0.0; // rad/s
};

/// Retained-node susceptance matrix after grounding slack buses and
/// Kron-eliminating interior nodes.
struct ReducedNetwork {
    std::vector<std::string> node_order; // converter bus labels
    Eigen::MatrixXd B_r;                 // symmetric PSD
    double omega0 = 0.0;
};

struct ConverterState {
    std::string bus;
    double U_pu = 1.0;
    double theta_rad = 0.0;
    double P_pu = 0.0;
    double Q_pu = 0.0;
    double S_B = 1.0;
};

struct OperatingPoint {
    std::vector<ConverterState> converters;
};

/// Matrices built from the reduced network and the steady state:
///   D  = diag((U_i e^{j theta_i})^2 / (S_i e^{j phi_i}))
///   Y  = U B_r conj(U)
///   S  = diag(P_i + j Q_i)
///   B_half = principal square root of B_r
struct OperatingMatrices {
    Eigen::VectorXcd D;
    Eigen::VectorXcd S;
    Eigen::MatrixXcd Y;
    Eigen::MatrixXd B_half;
    Eigen::VectorXd P, Q;
    Eigen::VectorXcd U_phasor;
};

ReducedNetwork build_reduced(const GridModel& model);

OperatingMatrices build_operating_matrices(const ReducedNetwork& net, const OperatingPoint& op);

/// Principal square root of a symmetric PSD matrix; eigenvalues below
/// -1e-8*lambda_max raise a definiteness error, small negatives are clipped.
Eigen::MatrixXd principal_sqrt_psd(const Eigen::MatrixXd& A);

} // namespace nmpz
