#include "nmpz/error.hpp"
#include "nmpz/fixtures.hpp"
#include "nmpz/margin.hpp"
#include "nmpz/transfer_matrix.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace nmpz;

namespace {

LoopEval didactic(double z, double Kp, double Ki) {
    auto L = std::make_shared<TransferMatrix>(didactic_loop(z, Kp, Ki));
    return [L](Complex s) { return tm_eval(*L, s); };
}

// Transmission zeros of the didactic plant with their unit left directions.
std::vector<ZeroWithDirection> plant_zeros(double z) {
    TransferMatrix J = didactic_plant(z);
    std::vector<ZeroWithDirection> out;
    for (Complex r : poly_roots(tm_det(J).num())) {
        if (r.real() <= 0.0) continue;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(tm_eval(J, Complex(r.real(), 0)),
                                               Eigen::ComputeFullU);
        out.push_back({r.real(), svd.matrixU().col(1)});
    }
    return out;
}

} // namespace

TEST_CASE("high-gain scalar loop has |T| = 1") {
    LoopEval L = [](Complex s) {
        return Eigen::MatrixXcd::Constant(1, 1, Complex(1e6, 0) / s);
    };
    FrequencySweep sw = sweep(L, log_grid(0.5, 2.0, 16));
    for (int i = 0; i < sw.omegas.size(); ++i) CHECK(std::abs(sw.sigma_max(i) - 1.0) < 1e-6);
}

TEST_CASE("T + S = I at every sample") {
    LoopEval L = didactic(60.0, 5.0, 50.0);
    FrequencySweep sw = sweep(L, log_grid(1e-2, 1e3, 64));
    for (int i = 0; i < sw.omegas.size(); ++i) {
        const Eigen::MatrixXcd Lw = L(Complex(0, sw.omegas(i)));
        const Eigen::MatrixXcd S = (Eigen::MatrixXcd::Identity(2, 2) + Lw).inverse();
        CHECK((sw.T_samples[size_t(i)] + S - Eigen::MatrixXcd::Identity(2, 2)).norm() <
              1e-10 * (1.0 + S.norm()));
    }
}

TEST_CASE("sigma_max matches an independent recomputation at random points") {
    LoopEval L = didactic(60.0, 5.0, 50.0);
    FrequencySweep sw = sweep(L, log_grid(1e-1, 1e3, 256));
    Rng rng(17);
    for (int t = 0; t < 20; ++t) {
        const int i = rng.uniform_int(0, int(sw.omegas.size()) - 1);
        const Eigen::MatrixXcd Lw = L(Complex(0, sw.omegas(i)));
        const Eigen::MatrixXcd T =
            Lw * (Eigen::MatrixXcd::Identity(2, 2) + Lw).inverse();
        const double smax = Eigen::JacobiSVD<Eigen::MatrixXcd>(T).singularValues()(0);
        CHECK(std::abs(smax - sw.sigma_max(i)) < 1e-10 * std::max(1.0, smax));
    }
}

TEST_CASE("didactic peak ordering in the zero location") {
    // Peak magnitude rises as the zero approaches the origin.
    const Eigen::VectorXd grid = log_grid(1e-2, 1e4, 4096);
    const double m40 = sweep(didactic(40.0, 5.0, 50.0), grid).M_T;
    const double m60 = sweep(didactic(60.0, 5.0, 50.0), grid).M_T;
    const double m80 = sweep(didactic(80.0, 5.0, 50.0), grid).M_T;
    CHECK(m40 > m60);
    CHECK(m60 > m80);
}

TEST_CASE("doubling the grid density moves M_T by less than 0.1 percent") {
    const double m1 = sweep(didactic(60.0, 5.0, 50.0), log_grid(1e-2, 1e4, 2048)).M_T;
    const double m2 = sweep(didactic(60.0, 5.0, 50.0), log_grid(1e-2, 1e4, 4096)).M_T;
    CHECK(std::abs(m1 - m2) < 1e-3 * m2);
}

TEST_CASE("bounds: single real zero collapses MIMO and scalar routes") {
    Eigen::VectorXcd w(2);
    w << Complex(0.8, 0.1), Complex(0.55, -0.2);
    w /= w.norm();
    BoundReport rep = bounds({{100.0, w}}, 100.0, 0.0);
    CHECK(std::abs(rep.bound_mimo - rep.bound_scalar) <= 1e-9 * rep.bound_mimo);
    CHECK(rep.bound_scalar == doctest::Approx(std::exp(M_PI / 2.0)).epsilon(1e-12));
    CHECK(rep.bound_scalar == doctest::Approx(4.8104773809653516).epsilon(1e-12));
}

TEST_CASE("bounds are vacuous without NMP zeros") {
    BoundReport rep = bounds({}, 50.0, 0.0);
    CHECK(rep.vacuous);
    CHECK(rep.bound_mimo == 1.0);
    CHECK(rep.bound_scalar == 1.0);
}

TEST_CASE("scalar bound decreases as the dominant zero moves out") {
    Eigen::VectorXcd w(2);
    w << 1.0, 0.0;
    double prev = 1e300;
    for (double z : {40.0, 60.0, 80.0, 120.0}) {
        BoundReport rep = bounds({{z, w}}, 20.0, 0.0);
        CHECK(rep.bound_scalar < prev);
        prev = rep.bound_scalar;
    }
}

TEST_CASE("weighted sensitivity integral dominates the direction bound") {
    for (double z : {40.0, 60.0, 80.0}) {
        LoopEval L = didactic(z, 5.0, 50.0);
        auto zd = plant_zeros(z);
        REQUIRE(zd.size() == 1);
        IntegralReport rep = bode_integral_check(L, zd, zd[0].z * 1e-3, zd[0].z * 1e4, 120000);
        CHECK(rep.holds);
        CHECK(rep.margin > 0.0);
        CHECK(rep.conclusive);
        CHECK(rep.truncation_est <= 0.1 * std::abs(rep.rhs));
    }
}

TEST_CASE("integral check is stable under step halving") {
    LoopEval L = didactic(60.0, 5.0, 50.0);
    auto zd = plant_zeros(60.0);
    IntegralReport full = bode_integral_check(L, zd, zd[0].z * 1e-3, zd[0].z * 1e4, 120000);
    IntegralReport half = bode_integral_check(L, zd, zd[0].z * 1e-3, zd[0].z * 1e4, 60000);
    CHECK(std::abs(full.lhs - half.lhs) < full.truncation_est + 1e-12);
}

TEST_CASE("integral check with no zeros reduces to the C term") {
    LoopEval L = didactic(60.0, 5.0, 50.0);
    IntegralReport rep = bode_integral_check(L, {}, 0.05, 6e5, 60000);
    // rhs = (pi/2) lambda_max(C) with C negative semidefinite here
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rep.C);
    CHECK(rep.rhs == doctest::Approx(0.5 * M_PI * es.eigenvalues().maxCoeff()).epsilon(1e-12));
    CHECK(rep.lhs >= rep.rhs);
}

TEST_CASE("nyquist distance for static loops") {
    for (double k : {0.0, 0.7, 2.0}) {
        LoopEval L = [k](Complex) { return Eigen::MatrixXcd::Constant(1, 1, Complex(k, 0)); };
        NyquistResult res = nyquist(L, log_grid(0.1, 10.0, 64));
        CHECK(res.min_distance == doctest::Approx(std::abs(k + 1.0)).epsilon(1e-12));
        CHECK(res.encirclements == 0);
    }
}

TEST_CASE("nyquist of a stable integrator loop does not encircle") {
    LoopEval L = [](Complex s) { return Eigen::MatrixXcd::Constant(1, 1, Complex(5.0, 0) / s); };
    NyquistResult res = nyquist(L, log_grid(1e-4, 1e4, 4096));
    CHECK(res.encirclements == 0);
}

TEST_CASE("nyquist verdict agrees with the closed-loop pole oracle") {
    // Unstable configuration of the near-origin-zero system.
    {
        LoopEval L = didactic(0.01, 1.0, 10.0);
        NyquistResult res = nyquist(L, log_grid(1e-5, 1e6, 16384));
        auto poles = closed_loop_poles(didactic_loop(0.01, 1.0, 10.0));
        CHECK(poles.dominant.real() > 0.0);
        CHECK(res.encirclements != 0);
    }
    // Stable configuration.
    {
        LoopEval L = didactic(0.01, 0.001, 0.01);
        NyquistResult res = nyquist(L, log_grid(1e-5, 1e6, 16384));
        auto poles = closed_loop_poles(didactic_loop(0.01, 0.001, 0.01));
        CHECK(poles.dominant.real() < 0.0);
        CHECK(res.encirclements == 0);
    }
}

TEST_CASE("sweep input validation") {
    LoopEval L = [](Complex) { return Eigen::MatrixXcd::Identity(1, 1); };
    Eigen::VectorXd bad(2);
    bad << 2.0, 1.0;
    CHECK_THROWS_AS(sweep(L, bad), Error);
    CHECK_THROWS_AS(log_grid(-1.0, 1.0, 8), Error);
}

TEST_CASE("sweep marks singular samples and excludes them from the peak") {
    // L(jw) = -w^2 hits -1 exactly at w = 1.
    LoopEval L = [](Complex s) { return Eigen::MatrixXcd::Constant(1, 1, s * s); };
    Eigen::VectorXd grid = log_grid(0.1, 10.0, 3); // {0.1, 1, 10}
    FrequencySweep sw = sweep(L, grid);
    CHECK(sw.n_bad == 1);
    CHECK(sw.valid[1] == 0);
    CHECK(std::isfinite(sw.M_T));
}
