#include "nmpz/cli.hpp"

#include "nmpz/error.hpp"
#include "nmpz/fixtures.hpp"
#include "nmpz/io.hpp"
#include "nmpz/margin.hpp"
#include "nmpz/netjac.hpp"
#include "nmpz/reshape.hpp"
#include "nmpz/zerocalc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <cstdio>
#include <filesystem>
#include <sstream>

namespace nmpz {

namespace {

struct Problem {
    ReducedNetwork net;
    OperatingPoint op;
    OperatingMatrices mats;
    NetworkJacobian jac_base;  // no droop
    NetworkJacobian jac;       // droop applied
    bool has_droop = false;
};

int resolve_node(const ReducedNetwork& net, const std::string& key) {
    for (size_t i = 0; i < net.node_order.size(); ++i)
        if (net.node_order[i] == key) return int(i);
    try {
        const int idx = std::stoi(key);
        if (idx >= 1 && idx <= int(net.node_order.size())) return idx - 1;
    } catch (const std::exception&) {
    }
    fail_input("unknown droop node '" + key + "'");
}

Problem load_problem(const RunConfig& cfg) {
    Problem p;
    std::vector<DroopDirective> droop;
    if (!cfg.fixture.empty()) {
        Fixture f = load_fixture(cfg.fixture);
        if (!f.is_network() || !f.op)
            fail_input("fixture '" + cfg.fixture + "' is not a network fixture");
        p.net = *f.reduced;
        p.op = *f.op;
        droop = f.droop;
    } else {
        if (cfg.network_path.empty() || cfg.op_path.empty())
            fail_input("command needs --fixture or both --network and --op");
        NetworkInput in = parse_network_json(read_file(cfg.network_path));
        p.net = in.reduced ? *in.reduced : build_reduced(*in.model);
        p.op = parse_operating_point_json(read_file(cfg.op_path));
    }
    p.mats = build_operating_matrices(p.net, p.op);
    p.jac_base = NetworkJacobian::from(p.mats, p.net.omega0);
    p.jac = p.jac_base;
    for (const auto& d : droop) p.jac = apply_droop(p.jac, d.node, d.gain);
    for (const auto& [key, gain] : cfg.droop) p.jac = apply_droop(p.jac, resolve_node(p.net, key), gain);
    p.has_droop = p.jac.droop.cwiseAbs().maxCoeff() > 0.0;
    return p;
}

OracleOptions oracle_options(const RunConfig& cfg, double omega0) {
    OracleOptions opt;
    opt.s_min = cfg.grid_min > 0.0 ? cfg.grid_min : 1.0;
    opt.s_max = cfg.grid_max > 0.0 ? cfg.grid_max : 10.0 * omega0;
    opt.grid_points = cfg.grid_points > 0 ? cfg.grid_points : 2048;
    return opt;
}

std::string out_path(const RunConfig& cfg, const std::string& file) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / file).string();
}

double nearest_root(const std::vector<OracleRoot>& roots, double z) {
    double best = std::numeric_limits<double>::quiet_NaN();
    double bestd = std::numeric_limits<double>::infinity();
    for (const auto& r : roots) {
        const double d = std::abs(r.s - z);
        if (d < bestd) {
            bestd = d;
            best = r.s;
        }
    }
    return best;
}

// --- providers -------------------------------------------------------------

LoopEval didactic_provider(double z, double Kp, double Ki) {
    auto L = std::make_shared<TransferMatrix>(didactic_loop(z, Kp, Ki));
    return [L](Complex s) { return tm_eval(*L, s); };
}

LoopEval device_provider(const Problem& p, const RunConfig& cfg) {
    DeviceModel dev = parse_device_json(read_file(cfg.device_path));
    auto Jvsc = std::make_shared<TransferMatrix>(build_device_jacobian(dev, p.net.node_order));
    NetworkJacobian jac = p.jac;
    return [Jvsc, jac](Complex s) {
        const Eigen::MatrixXcd Jv = tm_eval(*Jvsc, s);
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(Jv);
        if (!lu.isInvertible()) fail_numerical("device Jacobian singular at evaluation point");
        return (assemble_jnet(jac, s) * lu.inverse()).eval();
    };
}

std::vector<ZeroWithDirection> didactic_zero_directions(double z) {
    TransferMatrix J = didactic_plant(z);
    RationalFunction det = tm_det(J);
    std::vector<ZeroWithDirection> out;
    for (Complex r : poly_roots(det.num())) {
        if (r.real() <= 0.0 || std::abs(r.imag()) > 1e-9 * std::abs(r)) continue;
        const Eigen::MatrixXcd Jz = tm_eval(J, Complex(r.real(), 0.0));
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Jz, Eigen::ComputeFullU);
        Eigen::VectorXcd w = svd.matrixU().col(Jz.rows() - 1);
        for (int i = 0; i < w.size(); ++i)
            if (std::abs(w(i)) > 1e-8) {
                w *= std::conj(w(i)) / std::abs(w(i));
                break;
            }
        out.push_back({r.real(), w});
    }
    std::sort(out.begin(), out.end(),
              [](const ZeroWithDirection& a, const ZeroWithDirection& b) { return a.z < b.z; });
    return out;
}

Eigen::VectorXd sweep_grid(const RunConfig& cfg, double z_min, double z_max) {
    const double lo = cfg.grid_min > 0.0 ? cfg.grid_min : z_min / 100.0;
    const double hi = cfg.grid_max > 0.0 ? cfg.grid_max : z_max * 1000.0;
    const int pts = cfg.grid_points > 0
                        ? cfg.grid_points
                        : int(4096.0 * std::max(1.0, std::log10(hi / lo) / 7.0));
    return log_grid(lo, hi, pts);
}

// --- commands ---------------------------------------------------------------

int cmd_reduce(const RunConfig& cfg) {
    if (cfg.network_path.empty()) fail_input("reduce needs --network");
    NetworkInput in = parse_network_json(read_file(cfg.network_path));
    ReducedNetwork net = in.reduced ? *in.reduced : build_reduced(*in.model);
    write_file(out_path(cfg, "reduced.json"), serialize_reduced(net));
    std::printf("reduced %d nodes, wrote reduced.json\n", int(net.node_order.size()));
    return 0;
}

int cmd_zeros(const RunConfig& cfg) {
    Problem p = load_problem(cfg);
    NmpZeroSet set = zeros_closed_form(p.mats, p.net.omega0);
    OracleOptions opt = oracle_options(cfg, p.net.omega0);
    if (cfg.grid_max <= 0.0 && set.has_nmp())
        opt.s_max = std::max(opt.s_max, 1.5 * set.nmp_zeros().back());
    std::vector<OracleRoot> roots = zeros_oracle(p.jac, opt);

    std::string csv = "index,sigma,lambda_re,lambda_im,z_rad_s,is_nmp,residual,oracle_z_rad_s,oracle_rel_err\n";
    for (size_t i = 0; i < set.branches.size(); ++i) {
        const ZeroBranch& b = set.branches[i];
        csv += std::to_string(i) + "," + fmt17(b.sigma) + "," + fmt17(b.lambda.real()) + "," +
               fmt17(b.lambda.imag()) + ",";
        if (b.is_nmp) {
            const double res = zero_direction(p.jac_base, b.z).residual;
            const double oz = nearest_root(roots, b.z);
            csv += fmt17(b.z) + ",1," + fmt17(res) + ",";
            csv += std::isnan(oz) ? "" : fmt17(oz);
            csv += ",";
            csv += std::isnan(oz) ? "" : fmt17(std::abs(oz - b.z) / b.z);
        } else {
            csv += ",0,,,";
        }
        csv += "\n";
    }
    write_file(out_path(cfg, "zeros.csv"), csv);

    if (cfg.format == "json") {
        std::string j = "{\n  \"branches\": [\n";
        for (size_t i = 0; i < set.branches.size(); ++i) {
            const ZeroBranch& b = set.branches[i];
            j += "    {\"sigma\": " + fmt17(b.sigma) + ", \"lambda\": [" + fmt17(b.lambda.real()) +
                 "," + fmt17(b.lambda.imag()) + "], \"is_nmp\": " + (b.is_nmp ? "true" : "false");
            if (b.is_nmp) j += ", \"z_rad_s\": " + fmt17(b.z);
            j += "}";
            if (i + 1 < set.branches.size()) j += ",";
            j += "\n";
        }
        j += "  ],\n  \"oracle_roots\": [";
        for (size_t i = 0; i < roots.size(); ++i) {
            if (i) j += ", ";
            j += fmt17(roots[i].s);
        }
        j += "]\n}\n";
        write_file(out_path(cfg, "zeros.json"), j);
    }
    if (set.has_nmp())
        std::printf("dominant zero %s rad/s (%zu oracle roots in range)\n",
                    fmt17(set.dominant()).c_str(), roots.size());
    else
        std::printf("no NMP zeros (largest sigma %s)\n", fmt17(set.branches.front().sigma).c_str());
    return 0;
}

int cmd_direction(const RunConfig& cfg) {
    Problem p = load_problem(cfg);
    std::vector<double> zs;
    if (p.has_droop) {
        for (const auto& r : zeros_oracle(p.jac, oracle_options(cfg, p.net.omega0))) zs.push_back(r.s);
    } else {
        zs = zeros_closed_form(p.mats, p.net.omega0).nmp_zeros();
    }
    std::string csv = "z_rad_s,component,re,im,multiple\n";
    for (double z : zs) {
        ZeroDirection d = zero_direction(p.jac, z);
        for (int i = 0; i < d.basis.rows(); ++i)
            csv += fmt17(z) + "," + std::to_string(i) + "," + fmt17(d.basis(i, 0).real()) + "," +
                   fmt17(d.basis(i, 0).imag()) + "," + (d.multiple ? "1" : "0") + "\n";
    }
    write_file(out_path(cfg, "directions.csv"), csv);
    std::printf("wrote directions for %zu zeros\n", zs.size());
    return 0;
}

void write_bound_json(const RunConfig& cfg, const BoundReport& b, const IntegralReport* integral) {
    std::string j = "{\n";
    j += "  \"omega_c\": " + fmt17(b.omega_c) + ",\n";
    j += "  \"M_T\": " + fmt17(b.M_T) + ",\n";
    j += "  \"bound_mimo\": " + fmt17(b.bound_mimo) + ",\n";
    j += "  \"bound_scalar\": " + fmt17(b.bound_scalar) + ",\n";
    if (integral) {
        j += "  \"lhs_integral\": " + fmt17(integral->lhs) + ",\n";
        j += "  \"rhs_integral\": " + fmt17(integral->rhs) + ",\n";
        j += "  \"truncation_est\": " + fmt17(integral->truncation_est) + "\n";
    } else {
        j += "  \"lhs_integral\": null,\n  \"rhs_integral\": null,\n  \"truncation_est\": null\n";
    }
    j += "}\n";
    write_file(out_path(cfg, "bound.json"), j);
}

int cmd_bound(const RunConfig& cfg) {
    if (cfg.fixture == "didactic" ||
        (!cfg.device_path.empty() && (!cfg.network_path.empty() || !cfg.fixture.empty()))) {
        LoopEval L;
        std::vector<ZeroWithDirection> zd;
        if (cfg.fixture == "didactic") {
            L = didactic_provider(cfg.didactic_zero, cfg.kp, cfg.ki);
            zd = didactic_zero_directions(cfg.didactic_zero);
        } else {
            Problem p = load_problem(cfg);
            L = device_provider(p, cfg);
            NmpZeroSet set = zeros_closed_form(p.mats, p.net.omega0);
            fill_directions(set, p.jac_base);
            auto zs = set.nmp_zeros();
            for (size_t i = 0; i < zs.size(); ++i) zd.push_back({zs[i], set.directions[i]});
        }
        if (zd.empty()) fail_numerical("bound: no NMP zeros, bound is vacuous");
        const double zmin = zd.front().z, zmax = zd.back().z;
        FrequencySweep sw = sweep(L, sweep_grid(cfg, zmin, zmax));
        BoundReport b = bounds(zd, sw.omega_c, sw.M_T);
        IntegralReport ir = bode_integral_check(L, zd, zmin / 100.0, zmax * 1000.0,
                                                cfg.grid_points > 0 ? cfg.grid_points : 100000);
        write_bound_json(cfg, b, &ir);
        std::printf("M_T %s, omega_c %s, scalar bound %s, integral margin %s%s\n",
                    fmt17(sw.M_T).c_str(), fmt17(sw.omega_c).c_str(), fmt17(b.bound_scalar).c_str(),
                    fmt17(ir.margin).c_str(), ir.conclusive ? "" : " (inconclusive)");
        return 0;
    }
    // Zero-only scalar bound: needs a supplied omega_c.
    if (cfg.omega_c <= 0.0)
        fail_input("bound without a device model or didactic fixture needs --omega-c");
    Problem p = load_problem(cfg);
    NmpZeroSet set = zeros_closed_form(p.mats, p.net.omega0);
    if (!set.has_nmp()) fail_numerical("bound: no NMP zeros, bound is vacuous");
    fill_directions(set, p.jac_base);
    std::vector<ZeroWithDirection> zd;
    auto zs = set.nmp_zeros();
    for (size_t i = 0; i < zs.size(); ++i) zd.push_back({zs[i], set.directions[i]});
    BoundReport b = bounds(zd, cfg.omega_c, 0.0);
    write_bound_json(cfg, b, nullptr);
    std::printf("scalar bound %s at supplied omega_c %s\n", fmt17(b.bound_scalar).c_str(),
                fmt17(cfg.omega_c).c_str());
    return 0;
}

int cmd_rank(const RunConfig& cfg) {
    Problem p = load_problem(cfg);
    double z0;
    if (p.has_droop) {
        auto roots = zeros_oracle(p.jac, oracle_options(cfg, p.net.omega0));
        if (roots.empty()) fail_numerical("rank: no zeros found in the oracle range");
        z0 = roots.front().s;
    } else {
        z0 = zeros_closed_form(p.mats, p.net.omega0).dominant();
    }
    ReshapingReport rep = rank_nodes(p.jac, z0);

    std::string j = "{\n  \"z0_rad_s\": " + fmt17(rep.z0) + ",\n  \"S_sys\": [" +
                    fmt17(rep.S_sys.real()) + "," + fmt17(rep.S_sys.imag()) + "],\n  \"nodes\": [\n";
    for (int i = 0; i < p.jac.N; ++i) {
        j += "    {\"id\": \"" + p.net.node_order[size_t(i)] + "\", \"p_re\": " + fmt17(rep.p(i).real()) +
             ", \"p_im\": " + fmt17(rep.p(i).imag()) + ", \"dz_dk_re\": " + fmt17(rep.dz_dk(i).real()) +
             ", \"dz_dk_im\": " + fmt17(rep.dz_dk(i).imag()) + "}";
        if (i + 1 < p.jac.N) j += ",";
        j += "\n";
    }
    j += "  ],\n  \"ranking\": [";
    for (size_t i = 0; i < rep.ranking.size(); ++i) {
        if (i) j += ", ";
        j += "\"" + p.net.node_order[size_t(rep.ranking[i])] + "\"";
    }
    j += "],\n  \"passivity_gate\": ";
    j += rep.passivity_gate ? "true" : "false";
    j += "\n}\n";
    write_file(out_path(cfg, "rank.json"), j);
    std::printf("z0 %s rad/s, best node %s\n", fmt17(z0).c_str(),
                p.net.node_order[size_t(rep.ranking.front())].c_str());
    return 0;
}

int cmd_sweep(const RunConfig& cfg) {
    LoopEval L;
    double zmin = 0.0, zmax = 0.0;
    if (cfg.fixture == "didactic") {
        L = didactic_provider(cfg.didactic_zero, cfg.kp, cfg.ki);
        auto zd = didactic_zero_directions(cfg.didactic_zero);
        if (!zd.empty()) {
            zmin = zd.front().z;
            zmax = zd.back().z;
        }
    } else {
        Problem p = load_problem(cfg);
        if (cfg.device_path.empty()) fail_input("sweep needs --device for network data");
        L = device_provider(p, cfg);
        NmpZeroSet set = zeros_closed_form(p.mats, p.net.omega0);
        if (set.has_nmp()) {
            auto zs = set.nmp_zeros();
            zmin = zs.front();
            zmax = zs.back();
        }
    }
    if (zmin == 0.0) {
        zmin = cfg.grid_min > 0.0 ? cfg.grid_min * 100.0 : 1.0;
        zmax = cfg.grid_max > 0.0 ? cfg.grid_max / 1000.0 : 1000.0;
    }
    FrequencySweep sw = sweep(L, sweep_grid(cfg, zmin, zmax));
    std::string csv = "omega_rad_s,sigma_max_T,ln_sigma_over_w2\n";
    for (int i = 0; i < sw.omegas.size(); ++i) {
        if (!sw.valid[size_t(i)]) continue;
        csv += fmt17(sw.omegas(i)) + "," + fmt17(sw.sigma_max(i)) + "," +
               fmt17(std::log(sw.sigma_max(i)) / (sw.omegas(i) * sw.omegas(i))) + "\n";
    }
    write_file(out_path(cfg, "sweep.csv"), csv);
    std::printf("M_T %s at %s rad/s, omega_c %s, crossing bandwidth %s\n", fmt17(sw.M_T).c_str(),
                fmt17(sw.w_peak).c_str(), fmt17(sw.omega_c).c_str(),
                fmt17(sw.bandwidth_info).c_str());
    return 0;
}

int cmd_nyquist(const RunConfig& cfg) {
    LoopEval L;
    if (cfg.fixture == "didactic") {
        L = didactic_provider(cfg.didactic_zero, cfg.kp, cfg.ki);
    } else {
        Problem p = load_problem(cfg);
        if (cfg.device_path.empty()) fail_input("nyquist needs --device for network data");
        L = device_provider(p, cfg);
    }
    const double lo = cfg.grid_min > 0.0 ? cfg.grid_min : 1e-2;
    const double hi = cfg.grid_max > 0.0 ? cfg.grid_max : 1e5;
    NyquistResult res = nyquist(L, log_grid(lo, hi, cfg.grid_points > 0 ? cfg.grid_points : 8192));
    std::string csv = "omega_rad_s,locus_index,re,im\n";
    for (int i = 0; i < res.omegas.size(); ++i)
        for (int a = 0; a < res.loci.cols(); ++a)
            csv += fmt17(res.omegas(i)) + "," + std::to_string(a) + "," +
                   fmt17(res.loci(i, a).real()) + "," + fmt17(res.loci(i, a).imag()) + "\n";
    write_file(out_path(cfg, "nyquist.csv"), csv);
    std::printf("min distance to (-1,0): %s, encirclements: %d%s\n", fmt17(res.min_distance).c_str(),
                res.encirclements, res.pairing_warning ? " (pairing warning)" : "");
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    Problem p = load_problem(cfg);
    const double tol = cfg.tol_rel > 0.0 ? cfg.tol_rel : 1e-6;
    int failures = 0;
    auto check = [&](const char* name, bool ok, const std::string& detail) {
        std::printf("[%s] %s%s%s\n", ok ? "ok" : "FAIL", name, detail.empty() ? "" : ": ",
                    detail.c_str());
        if (!ok) ++failures;
    };

    // Dual assembly agreement at deterministic sample points.
    {
        Rng rng(7);
        double worst = 0.0;
        for (int t = 0; t < 8; ++t) {
            const Complex s(rng.uniform(1.0, 3.0 * p.net.omega0), rng.uniform(-100.0, 100.0));
            const Eigen::MatrixXcd A = assemble_jnet(p.jac, s);
            const Eigen::MatrixXcd B = assemble_jnet_blocks(p.jac, s);
            worst = std::max(worst, (A - B).cwiseAbs().maxCoeff() / A.norm());
        }
        check("dual-assembly", worst < 1e-12, "max rel diff " + fmt17(worst));
    }
    // Similarity transform: determinant preservation and closed block form.
    {
        const Complex s(137.0, 11.0);
        const Eigen::MatrixXcd J = assemble_jnet(p.jac_base, s);
        const Eigen::MatrixXcd T = similarity_w(J);
        const Complex d0 = Eigen::PartialPivLU<Eigen::MatrixXcd>(J).determinant();
        const Complex d1 = Eigen::PartialPivLU<Eigen::MatrixXcd>(T).determinant();
        const double derr = std::abs(d0 - d1) / std::max(1.0, std::abs(d0));
        const double berr = (T - similarity_blocks(p.jac_base, s)).cwiseAbs().maxCoeff() / T.norm();
        check("similarity", derr < 1e-10 && berr < 1e-10,
              "det drift " + fmt17(derr) + ", block form " + fmt17(berr));
    }
    // Three-route zero equivalence (droop-free system).
    {
        NmpZeroSet set = zeros_closed_form(p.mats, p.net.omega0);
        EigenRouteResult eig = zeros_eigen_route(p.mats, p.net.omega0);
        double lam_err = 0.0;
        for (size_t i = 0; i < set.branches.size(); ++i)
            lam_err = std::max(lam_err, std::abs(eig.lambdas(int(i)) -
                                                 Complex(set.branches[i].sigma * set.branches[i].sigma)) /
                                            std::max(1.0, set.branches[i].sigma * set.branches[i].sigma));
        bool ok = lam_err < 1e-8;
        std::string detail = "lambda vs sigma^2 " + fmt17(lam_err);
        if (set.has_nmp()) {
            auto zs = set.nmp_zeros();
            OracleOptions opt;
            opt.s_min = std::max(zs.front() * 0.5, 1e-3);
            opt.s_max = zs.back() * 2.0;
            opt.grid_points = 4096;
            auto roots = zeros_oracle(p.jac_base, opt);
            double zerr = 0.0;
            for (double z : zs) {
                const double oz = nearest_root(roots, z);
                zerr = std::max(zerr, std::isnan(oz) ? 1.0 : std::abs(oz - z) / z);
            }
            ok = ok && zerr < tol;
            detail += ", oracle " + fmt17(zerr);
        }
        check("three-route", ok, detail);
    }
    // Analytic vs finite-difference droop sensitivity at the dominant zero.
    {
        NmpZeroSet set = zeros_closed_form(p.mats, p.net.omega0);
        if (set.has_nmp()) {
            const double z0 = set.dominant();
            double worst = 0.0;
            bool got = false;
            for (int node = 0; node < p.jac_base.N; ++node) {
                const Sensitivity s = zero_sensitivity(p.jac_base, z0, node);
                const double delta = 1e-4;
                NetworkJacobian pert = apply_droop(p.jac_base, node, delta);
                if (auto zfd = refine_root_near(pert, z0)) {
                    const double fd = (*zfd - z0) / delta;
                    if (std::abs(fd) > 1e-9) {
                        worst = std::max(worst, std::abs(s.dz_dk.real() - fd) / std::abs(fd));
                        got = true;
                    }
                }
            }
            check("sensitivity-fd", !got || worst < 0.01, "max rel diff " + fmt17(worst));
        } else {
            check("sensitivity-fd", true, "skipped, no NMP zeros");
        }
    }
    if (failures > 0) {
        std::printf("verification FAILED (%d checks); inputs: %s\n", failures,
                    cfg.fixture.empty() ? cfg.network_path.c_str() : cfg.fixture.c_str());
        return 3;
    }
    std::printf("all verification checks passed\n");
    return 0;
}

} // namespace

int run(const RunConfig& cfg) {
    try {
        if (cfg.command == "reduce") return cmd_reduce(cfg);
        if (cfg.command == "zeros") return cmd_zeros(cfg);
        if (cfg.command == "direction") return cmd_direction(cfg);
        if (cfg.command == "bound") return cmd_bound(cfg);
        if (cfg.command == "rank") return cmd_rank(cfg);
        if (cfg.command == "sweep") return cmd_sweep(cfg);
        if (cfg.command == "nyquist") return cmd_nyquist(cfg);
        if (cfg.command == "verify") return cmd_verify(cfg);
        fail_input("unknown command '" + cfg.command + "'");
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return int(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

} // namespace nmpz
