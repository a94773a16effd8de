#pragma once

#include "nmpz/poly.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace nmpz {

/// Frequency-response provider: s -> L(s). Must be pure so sweeps can call
/// it from any context.
using LoopEval = std::function<Eigen::MatrixXcd(Complex)>;

Eigen::VectorXd log_grid(double w_lo, double w_hi, int points);

struct FrequencySweep {
    Eigen::VectorXd omegas;
    std::vector<Eigen::MatrixXcd> T_samples;
    Eigen::VectorXd sigma_max;
    std::vector<char> valid; // I + L invertible at the sample

    double M_T = 0.0;
    double w_peak = 0.0;
    double omega_c = 0.0; // argmax of ln(sigma_max)/w^2 above the floor
    /// Informational only: lowest w where sigma_max crosses 1/sqrt(2).
    double bandwidth_info = 0.0;
    int n_bad = 0;
};

/// Complementary sensitivity sweep: T = L(I+L)^{-1} per grid point, peak
/// M_T and characteristic frequency omega_c with local golden-section
/// refinement around the grid argmax.
FrequencySweep sweep(const LoopEval& L, const Eigen::VectorXd& omegas);

/// An NMP zero paired with its unit output direction.
struct ZeroWithDirection {
    double z = 0.0;
    Eigen::VectorXcd w;
};

struct BoundReport {
    double omega_c = 0.0;
    double M_T = 0.0;
    double bound_mimo = 1.0;
    double bound_scalar = 1.0;
    bool vacuous = false; // no NMP zeros
};

/// Exponential lower bounds on M_T: the MIMO route through
/// exp((pi/4) w_c lambda_max(sum 2 Re(z)/|z|^2 w w^H)) and the scalar route
/// exp(pi w_c / (2 z0)) through the dominant zero alone.
BoundReport bounds(const std::vector<ZeroWithDirection>& zeros, double omega_c, double M_T);

struct IntegralReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double truncation_est = 0.0;
    bool conclusive = true;
    bool holds = false;
    Eigen::MatrixXcd C; // symmetrized T'(0) T^{-1}(0)
};

/// Weighted integral of ln(sigma_max(T(jw) T^{-1}(0)))/w^2 against the
/// zero-direction bound, with head/tail truncation estimates and the
/// low-frequency constant from central finite differences of T around 0.
IntegralReport bode_integral_check(const LoopEval& L, const std::vector<ZeroWithDirection>& zeros,
                                   double w_lo, double w_hi, int points);

struct NyquistResult {
    Eigen::VectorXd omegas;
    Eigen::MatrixXcd loci; // points x n, continuity-matched
    double min_distance = 0.0;
    int encirclements = 0; // of (-1, 0), closed contour with conjugate half
    bool pairing_warning = false;
};

/// Generalized Nyquist eigenloci of L(jw), continuity-matched by greedy
/// minimal displacement; encirclements counted on det(I + L(jw)) with the
/// integrator indentation handled analytically.
NyquistResult nyquist(const LoopEval& L, const Eigen::VectorXd& omegas);

} // namespace nmpz
