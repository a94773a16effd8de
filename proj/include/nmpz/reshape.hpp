#pragma once

#include "nmpz/netjac.hpp"

#include <Eigen/Dense>

#include <vector>

namespace nmpz {

/// Participation factors and zero sensitivities at the dominant zero.
/// l, r are left/right eigenvectors of J_sys(z0) at its numerically-zero
/// eigenvalue, normalized l^H r = 1; p_i = conj(l_{N+i}) * r_{N+i} indexes
/// the Q-U diagonal block, matching the droop-gain placement.
struct ReshapingReport {
    double z0 = 0.0;
    Eigen::VectorXcd l, r;
    Eigen::VectorXcd p;       // per node
    Eigen::VectorXcd dz_dk;   // per node, p_i * S_sys
    Complex S_sys = 0.0;      // global scaling factor
    std::vector<int> ranking; // nodes by descending Re(p_i)
    bool passivity_gate = false; // Re(Y) positive definite
};

ReshapingReport participation_factors(const NetworkJacobian& jac, double z0);

struct Sensitivity {
    Complex dz_dk;
    Complex S_sys;
};

/// Analytical dz0/dk for one node via the implicit-function formula with
/// the closed-form d/ds of alpha, beta.
Sensitivity zero_sensitivity(const NetworkJacobian& jac, double z0, int node);

/// Full report with ranking and sensitivities filled.
ReshapingReport rank_nodes(const NetworkJacobian& jac, double z0);

struct UniformGainReport {
    Complex S_sys;
    double analytic_uniform = 0.0;     // Re(sum_i p_i * S_sys)
    double fd_uniform = 0.0;           // finite-difference oracle, uniform gain
    Complex uniform_eig_route = 0.0;  // dz/dk through d lambda/dk of S^-1(Y+kI)conj(S)^-1(conj(Y)+kI)
    double fd_agreement_rel = 0.0;     // |analytic - fd| / |fd|
    bool agreement_within_1pct = false;
    bool passivity_gate = false;
    bool positivity = false; // Re(S_sys) > 0, asserted only under the gate
    std::string verdict;     // "positive", "passivity precondition unmet", ...
};

UniformGainReport uniform_gain_check(const NetworkJacobian& jac, double z0);

} // namespace nmpz
