#pragma once

#include "nmpz/netjac.hpp"
#include "nmpz/network.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace nmpz {

struct ZeroBranch {
    double sigma = 0.0;   // singular value of B_half * D * B_half
    Complex lambda = 0.0; // matching eigenvalue of S^-1 Y conj(S)^-1 conj(Y)
    bool is_nmp = false;
    bool marginal = false; // sigma within 1e-9 of 1: no zero emitted
    double z = 0.0;        // rad/s, valid when is_nmp
};

/// Singular values, zero locations and (on demand) output zero directions.
/// Branches are sorted by descending sigma; the dominant zero is the
/// smallest z among NMP branches.
struct NmpZeroSet {
    std::vector<ZeroBranch> branches;
    double omega0 = 0.0;
    /// Unit left null directions per NMP branch, filled by fill_directions.
    std::vector<Eigen::VectorXcd> directions;

    bool has_nmp() const;
    /// Smallest z among NMP branches. Throws if none.
    double dominant() const;
    std::vector<double> nmp_zeros() const; // ascending
};

/// Closed-form route: sigma_i of B_half * D * B_half, z_i = omega0*sqrt(sigma_i^2 - 1).
NmpZeroSet zeros_closed_form(const OperatingMatrices& m, double omega0);

struct EigenRouteResult {
    Eigen::VectorXcd lambdas; // sorted by descending |lambda|
    std::vector<double> z;    // zeros from branches with Re(lambda) > 1, ascending
};

/// Eigenvalue route: lambda_i of S^-1 Y conj(S)^-1 conj(Y); equals sigma_i^2.
EigenRouteResult zeros_eigen_route(const OperatingMatrices& m, double omega0);

struct OracleOptions {
    double s_min = 1.0;
    double s_max = 0.0; // 0 -> 10*omega0
    int grid_points = 2048;
};

struct OracleRoot {
    double s = 0.0;
    bool multiplicity_suspect = false; // found via singular-value dip, no sign change
};

/// Determinant-root oracle on the real axis: scans det(J_sys(s)) on a
/// log-spaced grid, brackets sign changes and bisects to 1e-9 relative, and
/// additionally hunts even-multiplicity roots through dips of the smallest
/// singular value refined by golden section. Works for droop-perturbed
/// Jacobians where the closed form does not apply.
std::vector<OracleRoot> zeros_oracle(const NetworkJacobian& jac, const OracleOptions& opt = {});

/// Refine a root of det(J_sys) near a first guess by expanding a bracket and
/// bisecting; used by the finite-difference sensitivity oracles.
std::optional<double> refine_root_near(const NetworkJacobian& jac, double guess);

struct ZeroDirection {
    Eigen::MatrixXcd basis; // unit columns spanning the left null space
    bool multiple = false;  // null-space dimension > 1
    double residual = 0.0;  // ||w^H J(z)|| / ||J(z)||
};

/// Left singular vector of J_sys(z) for the smallest singular value, with
/// the first nonzero component rotated to positive real. Throws if z is not
/// a root within tolerance.
ZeroDirection zero_direction(const NetworkJacobian& jac, double z);

/// Populate set.directions for every NMP branch (ascending-z order matches
/// nmp_zeros()).
void fill_directions(NmpZeroSet& set, const NetworkJacobian& jac);

} // namespace nmpz
