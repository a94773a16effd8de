#include "nmpz/margin.hpp"

#include "nmpz/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nmpz {

namespace {

const Complex kJ(0.0, 1.0);

double sigma_max_T(const LoopEval& L, double w, bool* ok = nullptr) {
    const Eigen::MatrixXcd Lw = L(kJ * w);
    const int n = int(Lw.rows());
    Eigen::MatrixXcd IL = Eigen::MatrixXcd::Identity(n, n) + Lw;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(IL);
    if (!lu.isInvertible()) {
        if (ok) *ok = false;
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (ok) *ok = true;
    const Eigen::MatrixXcd T = Lw * lu.inverse();
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(T).singularValues()(0);
}

// Golden-section maximization of f over [a, b].
template <typename F>
double golden_max(F f, double a, double b, int iters = 80) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < iters && (b - a) > 1e-12 * std::max(b, 1.0); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

Eigen::VectorXd log_grid(double w_lo, double w_hi, int points) {
    if (!(0.0 < w_lo && w_lo < w_hi) || points < 2) fail_input("log_grid: bad grid parameters");
    Eigen::VectorXd g(points);
    const double l0 = std::log(w_lo), step = (std::log(w_hi) - l0) / (points - 1);
    for (int i = 0; i < points; ++i) g(i) = std::exp(l0 + i * step);
    return g;
}

FrequencySweep sweep(const LoopEval& L, const Eigen::VectorXd& omegas) {
    const int n = int(omegas.size());
    if (n < 2) fail_input("sweep: need at least two grid points");
    for (int i = 1; i < n; ++i)
        if (!(omegas(i) > omegas(i - 1))) fail_input("sweep: omegas must be strictly ascending");

    FrequencySweep sw;
    sw.omegas = omegas;
    sw.T_samples.resize(n);
    sw.sigma_max.resize(n);
    sw.valid.assign(n, 1);

    for (int i = 0; i < n; ++i) {
        const Eigen::MatrixXcd Lw = L(kJ * omegas(i));
        const int m = int(Lw.rows());
        Eigen::MatrixXcd IL = Eigen::MatrixXcd::Identity(m, m) + Lw;
        Eigen::JacobiSVD<Eigen::MatrixXcd> il_svd(IL, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = il_svd.singularValues();
        if (sv(m - 1) <= 1e-12 * std::max(1.0, sv(0))) {
            // I + L numerically singular here: excluded from the peak search
            sw.valid[size_t(i)] = 0;
            ++sw.n_bad;
            sw.sigma_max(i) = std::numeric_limits<double>::quiet_NaN();
            sw.T_samples[size_t(i)] = Eigen::MatrixXcd();
            continue;
        }
        sw.T_samples[size_t(i)] =
            Lw * (il_svd.matrixV() * sv.cwiseInverse().asDiagonal() * il_svd.matrixU().adjoint());
        sw.sigma_max(i) =
            Eigen::JacobiSVD<Eigen::MatrixXcd>(sw.T_samples[size_t(i)]).singularValues()(0);
    }

    // Peak with local refinement.
    int imax = -1;
    for (int i = 0; i < n; ++i)
        if (sw.valid[size_t(i)] && (imax < 0 || sw.sigma_max(i) > sw.sigma_max(imax))) imax = i;
    if (imax < 0) fail_numerical("sweep: I+L singular at every grid point");
    {
        const double a = omegas(std::max(imax - 1, 0));
        const double b = omegas(std::min(imax + 1, n - 1));
        const double w_star = golden_max([&](double w) { return sigma_max_T(L, w); }, a, b);
        const double s_star = sigma_max_T(L, w_star);
        if (s_star >= sw.sigma_max(imax)) {
            sw.M_T = s_star;
            sw.w_peak = w_star;
        } else {
            sw.M_T = sw.sigma_max(imax);
            sw.w_peak = omegas(imax);
        }
    }

    // Characteristic frequency: argmax of ln(sigma)/w^2 above the floor.
    const double w_floor = 1e-3 * omegas(0);
    auto qfun = [&](double w) {
        const double s = sigma_max_T(L, w);
        return std::isfinite(s) && s > 0 ? std::log(s) / (w * w) : -std::numeric_limits<double>::infinity();
    };
    int iq = -1;
    for (int i = 0; i < n; ++i) {
        if (!sw.valid[size_t(i)] || omegas(i) <= w_floor || !(sw.sigma_max(i) > 0)) continue;
        const double q = std::log(sw.sigma_max(i)) / (omegas(i) * omegas(i));
        if (iq < 0 || q > std::log(sw.sigma_max(iq)) / (omegas(iq) * omegas(iq))) iq = i;
    }
    if (iq >= 0) {
        const double a = std::max(omegas(std::max(iq - 1, 0)), w_floor);
        const double b = omegas(std::min(iq + 1, n - 1));
        const double w_star = golden_max(qfun, a, b);
        sw.omega_c = qfun(w_star) >= qfun(omegas(iq)) ? w_star : omegas(iq);
    }

    // Informational bandwidth: first crossing of 1/sqrt(2).
    const double lvl = 1.0 / std::sqrt(2.0);
    sw.bandwidth_info = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i + 1 < n; ++i) {
        if (!sw.valid[size_t(i)] || !sw.valid[size_t(i + 1)]) continue;
        const double f0 = sw.sigma_max(i) - lvl, f1 = sw.sigma_max(i + 1) - lvl;
        if ((f0 < 0) != (f1 < 0)) {
            double a = omegas(i), b = omegas(i + 1), fa = f0;
            for (int it = 0; it < 80; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = sigma_max_T(L, m) - lvl;
                if ((fa < 0) != (fm < 0)) {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            sw.bandwidth_info = 0.5 * (a + b);
            break;
        }
    }
    return sw;
}

BoundReport bounds(const std::vector<ZeroWithDirection>& zeros, double omega_c, double M_T) {
    BoundReport rep;
    rep.omega_c = omega_c;
    rep.M_T = M_T;
    if (zeros.empty()) {
        rep.vacuous = true; // no NMP zeros: both bounds degenerate to 1
        return rep;
    }
    const int dim = int(zeros.front().w.size());
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
    double z0 = std::numeric_limits<double>::infinity();
    for (const auto& zd : zeros) {
        H += (2.0 * zd.z / (zd.z * zd.z)) * (zd.w * zd.w.adjoint());
        z0 = std::min(z0, zd.z);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    rep.bound_mimo = std::exp(0.25 * M_PI * omega_c * es.eigenvalues().maxCoeff());
    rep.bound_scalar = std::exp(0.5 * M_PI * omega_c / z0);
    return rep;
}

IntegralReport bode_integral_check(const LoopEval& L, const std::vector<ZeroWithDirection>& zeros,
                                   double w_lo, double w_hi, int points) {
    if (zeros.empty() && points < 2) fail_input("bode_integral_check: empty grid");
    const Eigen::VectorXd ws = log_grid(w_lo, w_hi, points);
    const int n = int(ws.size());

    // T(0) and T'(0) by central differences on the real axis.
    const double delta = 1e-4 * w_lo;
    auto Teval = [&](Complex s) {
        const Eigen::MatrixXcd Lw = L(s);
        const int m = int(Lw.rows());
        Eigen::MatrixXcd IL = Eigen::MatrixXcd::Identity(m, m) + Lw;
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(IL);
        if (!lu.isInvertible()) fail_numerical("bode_integral_check: I+L singular near 0");
        return (Lw * lu.inverse()).eval();
    };
    const Eigen::MatrixXcd Tp = Teval(Complex(delta, 0.0));
    const Eigen::MatrixXcd Tm = Teval(Complex(-delta, 0.0));
    const Eigen::MatrixXcd T0 = 0.5 * (Tp + Tm);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu0(T0);
    if (!lu0.isInvertible()) fail_numerical("bode_integral_check: T(0) singular");
    const Eigen::MatrixXcd T0inv = lu0.inverse();
    const Eigen::MatrixXcd TpT = ((Tp - Tm) / (2.0 * delta)) * T0inv;

    IntegralReport rep;
    rep.C = 0.5 * (TpT + TpT.adjoint());

    Eigen::VectorXd lnsig(n);
    for (int i = 0; i < n; ++i) {
        const Eigen::MatrixXcd T = Teval(kJ * ws(i));
        lnsig(i) = std::log(Eigen::JacobiSVD<Eigen::MatrixXcd>(T * T0inv).singularValues()(0));
    }

    double main = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        const double f0 = lnsig(i) / (ws(i) * ws(i));
        const double f1 = lnsig(i + 1) / (ws(i + 1) * ws(i + 1));
        main += 0.5 * (f0 + f1) * (ws(i + 1) - ws(i));
    }

    // Head: the integrand tends to a constant as w -> 0.
    const double head = (lnsig(0) / (ws(0) * ws(0))) * ws(0);
    // Tail: fit ln sigma ~ a - b ln w over the last decade; integrate exactly.
    double a_fit = lnsig(n - 1), b_fit = 0.0;
    {
        std::vector<int> sel;
        for (int i = 0; i < n; ++i)
            if (ws(i) > w_hi / 10.0) sel.push_back(i);
        if (sel.size() >= 2) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (int i : sel) {
                const double x = -std::log(ws(i));
                sx += x;
                sy += lnsig(i);
                sxx += x * x;
                sxy += x * lnsig(i);
            }
            const double m = double(sel.size());
            b_fit = (m * sxy - sx * sy) / (m * sxx - sx * sx);
            a_fit = (sy - b_fit * sx) / m;
        }
    }
    const double tail = (a_fit - b_fit * (std::log(w_hi) + 1.0)) / w_hi;

    rep.lhs = main + head + tail;
    rep.truncation_est = std::abs(head) + std::abs(tail);

    Eigen::MatrixXcd H = rep.C;
    for (const auto& zd : zeros) H += (2.0 * zd.z / (zd.z * zd.z)) * (zd.w * zd.w.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (H + H.adjoint()));
    rep.rhs = 0.5 * M_PI * es.eigenvalues().maxCoeff();

    rep.margin = rep.lhs - rep.rhs;
    rep.holds = rep.margin >= 0.0;
    rep.conclusive = rep.truncation_est <= 0.1 * std::abs(rep.rhs);
    return rep;
}

NyquistResult nyquist(const LoopEval& L, const Eigen::VectorXd& omegas) {
    const int np = int(omegas.size());
    if (np < 2) fail_input("nyquist: need at least two grid points");

    NyquistResult res;
    res.omegas = omegas;
    res.min_distance = std::numeric_limits<double>::infinity();

    int nloci = 0;
    std::vector<Eigen::VectorXcd> eig(np);
    Eigen::VectorXcd detv(np);
    for (int i = 0; i < np; ++i) {
        const Eigen::MatrixXcd Lw = L(kJ * omegas(i));
        if (i == 0) nloci = int(Lw.rows());
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Lw, false);
        eig[size_t(i)] = es.eigenvalues();
        Eigen::MatrixXcd IL = Eigen::MatrixXcd::Identity(nloci, nloci) + Lw;
        detv(i) = Eigen::PartialPivLU<Eigen::MatrixXcd>(IL).determinant();
    }

    // Continuity matching: greedy minimal displacement between consecutive
    // grid points; ambiguities only affect locus coloring, not the distance.
    res.loci.resize(np, nloci);
    res.loci.row(0) = eig[0].transpose();
    for (int i = 1; i < np; ++i) {
        std::vector<bool> used(size_t(nloci), false);
        for (int a = 0; a < nloci; ++a) {
            int best = -1;
            double bestd = std::numeric_limits<double>::infinity();
            for (int b = 0; b < nloci; ++b) {
                if (used[size_t(b)]) continue;
                const double d = std::abs(res.loci(i - 1, a) - eig[size_t(i)](b));
                if (d < bestd) {
                    bestd = d;
                    best = b;
                }
            }
            used[size_t(best)] = true;
            res.loci(i, a) = eig[size_t(i)](best);
        }
        for (int a = 0; a < nloci; ++a)
            for (int b = a + 1; b < nloci; ++b)
                if (std::abs(eig[size_t(i)](a) - eig[size_t(i)](b)) < 1e-10) res.pairing_warning = true;
    }

    for (int i = 0; i < np; ++i)
        for (int a = 0; a < nloci; ++a)
            res.min_distance = std::min(res.min_distance, std::abs(res.loci(i, a) + 1.0));

    // Encirclements of (-1,0) = winding of det(I+L(jw)) about the origin.
    // The positive-frequency half contributes its unwrapped angle twice (the
    // conjugate half mirrors it); integrator channels add the analytic
    // indentation arc -r*pi.
    double darg = 0.0;
    double prev = std::arg(detv(0));
    for (int i = 1; i < np; ++i) {
        double cur = std::arg(detv(i));
        double d = cur - prev;
        while (d > M_PI) d -= 2.0 * M_PI;
        while (d < -M_PI) d += 2.0 * M_PI;
        darg += d;
        prev = cur;
    }
    const double slope = (std::log(std::abs(detv(1))) - std::log(std::abs(detv(0)))) /
                         (std::log(omegas(1)) - std::log(omegas(0)));
    int r_int = 0;
    if (slope < -0.5) r_int = int(std::lround(-slope));
    res.encirclements = int(std::lround((2.0 * darg - r_int * M_PI) / (2.0 * M_PI)));
    return res;
}

} // namespace nmpz
