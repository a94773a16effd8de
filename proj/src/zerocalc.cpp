#include "nmpz/zerocalc.hpp"

#include "nmpz/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nmpz {

namespace {
constexpr double kNmpTol = 1e-9;
constexpr double kBisectRel = 1e-9;
constexpr double kDipAccept = 1e-6; // refined smin below this * ||J|| is a root
} // namespace

bool NmpZeroSet::has_nmp() const {
    for (const auto& b : branches)
        if (b.is_nmp) return true;
    return false;
}

double NmpZeroSet::dominant() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : branches)
        if (b.is_nmp) best = std::min(best, b.z);
    if (!std::isfinite(best)) fail_numerical("NmpZeroSet::dominant: no NMP branches");
    return best;
}

std::vector<double> NmpZeroSet::nmp_zeros() const {
    std::vector<double> z;
    for (const auto& b : branches)
        if (b.is_nmp) z.push_back(b.z);
    std::sort(z.begin(), z.end());
    return z;
}

NmpZeroSet zeros_closed_form(const OperatingMatrices& m, double omega0) {
    const int n = int(m.D.size());
    const Eigen::MatrixXcd H =
        m.B_half.cast<Complex>() * m.D.asDiagonal() * m.B_half.cast<Complex>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H);
    const Eigen::VectorXd sig = svd.singularValues(); // descending

    // Eigen route values for the lambda column: lambda_i = sigma_i^2 exactly.
    Eigen::MatrixXcd M = m.D.asDiagonal() * m.B_half.cast<Complex>() * m.B_half.cast<Complex>() *
                         m.D.conjugate().asDiagonal() * m.B_half.cast<Complex>() *
                         m.B_half.cast<Complex>();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    std::vector<Complex> lam(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(lam.begin(), lam.end(),
              [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });

    NmpZeroSet out;
    out.omega0 = omega0;
    for (int i = 0; i < n; ++i) {
        ZeroBranch b;
        b.sigma = sig(i);
        b.lambda = lam[size_t(i)];
        if (std::abs(b.sigma - 1.0) <= kNmpTol) {
            b.marginal = true; // boundary artifact of rounding, no zero emitted
        } else if (b.sigma > 1.0 + kNmpTol) {
            b.is_nmp = true;
            b.z = omega0 * std::sqrt(b.sigma * b.sigma - 1.0);
        }
        out.branches.push_back(b);
    }
    return out;
}

EigenRouteResult zeros_eigen_route(const OperatingMatrices& m, double omega0) {
    const int n = int(m.S.size());
    Eigen::VectorXcd Sinv(n), Sbarinv(n);
    for (int i = 0; i < n; ++i) {
        Sinv(i) = 1.0 / m.S(i);
        Sbarinv(i) = 1.0 / std::conj(m.S(i));
    }
    const Eigen::MatrixXcd M =
        Sinv.asDiagonal() * m.Y * Sbarinv.asDiagonal() * m.Y.conjugate();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    std::vector<Complex> lam(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(lam.begin(), lam.end(),
              [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });

    EigenRouteResult out;
    out.lambdas.resize(n);
    for (int i = 0; i < n; ++i) {
        out.lambdas(i) = lam[size_t(i)];
        if (lam[size_t(i)].real() > 1.0 + kNmpTol)
            out.z.push_back(omega0 * std::sqrt(lam[size_t(i)].real() - 1.0));
    }
    std::sort(out.z.begin(), out.z.end());
    return out;
}

namespace {

double det_at(const NetworkJacobian& jac, double s) {
    return Eigen::PartialPivLU<Eigen::MatrixXd>(assemble_jnet_real(jac, s)).determinant();
}

double bisect_root(const NetworkJacobian& jac, double lo, double hi, double flo,
                   double tol = kBisectRel) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= tol * mid) return mid;
        const double fm = det_at(jac, mid);
        if (fm == 0.0) return mid;
        if ((flo < 0) != (fm < 0)) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    fail_numerical("zeros_oracle: bisection did not converge in bracket [" + std::to_string(lo) +
                   ", " + std::to_string(hi) + "]");
}

struct SminEval {
    double smin, smax;
};

SminEval smin_at(const NetworkJacobian& jac, double s) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(assemble_jnet_real(jac, s));
    const auto& sv = svd.singularValues();
    return {sv(sv.size() - 1), sv(0)};
}

double golden_min_smin(const NetworkJacobian& jac, double lo, double hi) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = smin_at(jac, c).smin, fd = smin_at(jac, d).smin;
    for (int it = 0; it < 90 && (b - a) > 1e-12 * b; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = smin_at(jac, c).smin;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = smin_at(jac, d).smin;
        }
    }
    return 0.5 * (a + b);
}

} // namespace

std::vector<OracleRoot> zeros_oracle(const NetworkJacobian& jac, const OracleOptions& opt) {
    double s_min = opt.s_min;
    double s_max = opt.s_max > 0.0 ? opt.s_max : 10.0 * jac.omega0;
    if (!(0.0 < s_min && s_min < s_max)) fail_input("zeros_oracle: need 0 < s_min < s_max");
    if (opt.grid_points < 16) fail_input("zeros_oracle: need at least 16 grid points");

    const int n = opt.grid_points;
    std::vector<double> grid(n), det(n), smin(n), smax(n);
    const double lr = std::log(s_min), step = (std::log(s_max) - lr) / (n - 1);
    for (int i = 0; i < n; ++i) {
        grid[i] = std::exp(lr + i * step);
        det[i] = det_at(jac, grid[i]);
        SminEval e = smin_at(jac, grid[i]);
        smin[i] = e.smin;
        smax[i] = e.smax;
    }

    std::vector<OracleRoot> roots;
    for (int i = 0; i + 1 < n; ++i) {
        if (det[i] == 0.0) {
            roots.push_back({grid[i], false});
        } else if ((det[i] < 0) != (det[i + 1] < 0)) {
            roots.push_back({bisect_root(jac, grid[i], grid[i + 1], det[i]), false});
        }
    }

    // Even-multiplicity roots: the determinant touches zero without a sign
    // change but the smallest singular value dips; refine the dip.
    for (int i = 1; i + 1 < n; ++i) {
        if (smin[i] <= smin[i - 1] && smin[i] <= smin[i + 1] && smin[i] < 1e-3 * smax[i]) {
            const double s_star = golden_min_smin(jac, grid[i - 1], grid[i + 1]);
            SminEval e = smin_at(jac, s_star);
            if (e.smin < kDipAccept * e.smax) {
                bool sign_change_nearby = false;
                for (const auto& r : roots)
                    if (std::abs(r.s - s_star) <= 1e-6 * std::max(r.s, s_star))
                        sign_change_nearby = true;
                if (!sign_change_nearby) roots.push_back({s_star, true});
            }
        }
    }

    std::sort(roots.begin(), roots.end(), [](const OracleRoot& a, const OracleRoot& b) {
        return a.s < b.s;
    });
    std::vector<OracleRoot> dedup;
    for (const auto& r : roots) {
        if (!dedup.empty() && std::abs(r.s - dedup.back().s) <= 1e-8 * r.s) continue;
        dedup.push_back(r);
    }
    return dedup;
}

std::optional<double> refine_root_near(const NetworkJacobian& jac, double guess) {
    double h = 1e-6 * guess;
    for (int it = 0; it < 40; ++it) {
        const double lo = std::max(guess - h, 1e-12);
        const double hi = guess + h;
        const double flo = det_at(jac, lo), fhi = det_at(jac, hi);
        if ((flo < 0) != (fhi < 0)) return bisect_root(jac, lo, hi, flo, 1e-14);
        h *= 2.0;
    }
    return std::nullopt;
}

ZeroDirection zero_direction(const NetworkJacobian& jac, double z) {
    const Eigen::MatrixXcd J = assemble_jnet(jac, Complex(z, 0.0));
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(J, Eigen::ComputeFullU);
    const Eigen::VectorXd sv = svd.singularValues();
    const int m = int(sv.size());
    const double scale = sv(0);
    if (sv(m - 1) > 1e-6 * scale)
        fail_numerical("zero_direction: s = " + std::to_string(z) +
                       " is not a zero (relative smallest singular value " +
                       std::to_string(sv(m - 1) / scale) + ")");

    int dim = 1;
    while (dim < m && sv(m - 1 - dim) < 1e-6 * scale) ++dim;

    ZeroDirection out;
    out.multiple = dim > 1;
    out.basis.resize(m, dim);
    for (int k = 0; k < dim; ++k) {
        Eigen::VectorXcd w = svd.matrixU().col(m - 1 - k);
        // Deterministic sign: first nonzero component rotated to positive real.
        for (int i = 0; i < m; ++i) {
            if (std::abs(w(i)) > 1e-8) {
                w *= std::conj(w(i)) / std::abs(w(i));
                break;
            }
        }
        out.basis.col(k) = w / w.norm();
    }
    out.residual = (out.basis.col(0).adjoint() * J).norm() / scale;
    return out;
}

void fill_directions(NmpZeroSet& set, const NetworkJacobian& jac) {
    set.directions.clear();
    for (double z : set.nmp_zeros()) set.directions.push_back(zero_direction(jac, z).basis.col(0));
}

} // namespace nmpz
