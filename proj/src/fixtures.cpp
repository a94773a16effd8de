#include "nmpz/fixtures.hpp"

#include "nmpz/error.hpp"

#include <cmath>

namespace nmpz {

namespace {

constexpr double kOmega0 = 2.0 * M_PI * 50.0; // 50 Hz system

Eigen::MatrixXd nine_bus_reduced() {
    Eigen::MatrixXd B(3, 3);
    B << 6.91, -0.43, -0.16, -0.43, 8.97, -0.46, -0.16, -0.46, 2.03;
    return B;
}

ReducedNetwork nine_bus_net() {
    ReducedNetwork net;
    net.node_order = {"vsc1", "vsc2", "vsc3"};
    net.B_r = nine_bus_reduced();
    net.omega0 = kOmega0;
    return net;
}

double deg(double d) { return d * M_PI / 180.0; }

OperatingPoint table_op(const double U[3], const double theta_deg[3], const double P[3],
                        const double Q[3]) {
    OperatingPoint op;
    for (int i = 0; i < 3; ++i) {
        ConverterState c;
        c.bus = "vsc" + std::to_string(i + 1);
        c.U_pu = U[i];
        c.theta_rad = deg(theta_deg[i]);
        c.P_pu = P[i];
        c.Q_pu = Q[i];
        op.converters.push_back(c);
    }
    return op;
}

// Base reactive setpoints of the three converters; the Q outer loops hold
// these in every non-drooped configuration.
constexpr double kQset[3] = {0.44, 0.6, 0.0};

Fixture make_case(const std::string& name, const double U[3], const double th[3], double P3,
                  double z0, double tol, const std::string& prov) {
    Fixture f;
    f.name = name;
    f.reduced = nine_bus_net();
    const double P[3] = {0.9, 0.8, P3};
    f.op = table_op(U, th, P, kQset);
    f.expected["z0_rad_s"] = {z0, tol, prov};
    f.notes.push_back("voltage profile from the published steady-state table; reactive "
                      "injections held at the converter setpoints (0.44, 0.6, 0.0)");
    return f;
}

Fixture make_droop(const std::string& name, int node, const double U[3], const double th[3],
                   double z0) {
    Fixture f;
    f.name = name;
    f.reduced = nine_bus_net();
    const double P[3] = {0.9, 0.8, 1.0};
    double Q[3] = {kQset[0], kQset[1], kQset[2]};
    const double k = 10.0;
    // Post-droop reactive injection at the drooped node reconstructed from
    // the droop law against a 1.0 p.u. reference; the published tables list
    // voltages only.
    Q[node] = kQset[node] - k * (U[node] - 1.0);
    f.op = table_op(U, th, P, Q);
    f.droop.push_back({node, k});
    f.expected["z0_rad_s"] = {z0, 0.05, "published droop-placement table"};
    f.notes.push_back("post-droop Q at node " + std::to_string(node + 1) +
                      " reconstructed as Q_set - k*(U - 1.0); the true simulated value is "
                      "unpublished");
    return f;
}

} // namespace

TransferMatrix didactic_plant(double z) {
    TransferMatrix J(2, 2);
    J.at(0, 0) = RationalFunction(Polynomial({5.0, -5.0 / z}), Polynomial({10.0, 1.0}));
    J.at(0, 1) = RationalFunction(Polynomial({0.5}), Polynomial({20.0, 1.0}));
    J.at(1, 0) = J.at(0, 1);
    J.at(1, 1) = RationalFunction(Polynomial({5.0}), Polynomial({20.0, 1.0}));
    return J;
}

TransferMatrix didactic_controller(double Kp, double Ki) {
    // (Kp + Ki/s) / (0.05 s + 1) on both channels
    RationalFunction k(Polynomial({Ki, Kp}), Polynomial({0.0, 1.0}) * Polynomial({1.0, 0.05}));
    TransferMatrix K(2, 2);
    K.at(0, 0) = k;
    K.at(1, 1) = k;
    return K;
}

TransferMatrix didactic_loop(double z, double Kp, double Ki) {
    return didactic_plant(z) * didactic_controller(Kp, Ki);
}

std::vector<std::string> fixture_names() {
    return {"case1", "case2", "case3", "case1-published-d", "droop-node1",
            "droop-node2", "droop-node3", "didactic", "scalar", "table6-lines"};
}

Fixture load_fixture(const std::string& name) {
    if (name == "case1") {
        const double U[3] = {1.06, 1.06, 0.95};
        const double th[3] = {8.04, 6.51, 26.16};
        return make_case(name, U, th, 0.8, 640.0, 0.02, "published case table, first row");
    }
    if (name == "case2") {
        const double U[3] = {1.06, 1.06, 0.92};
        const double th[3] = {8.13, 6.69, 30.64};
        return make_case(name, U, th, 0.9, 495.0, 0.05, "published case table, second row");
    }
    if (name == "case3") {
        const double U[3] = {1.06, 1.05, 0.86};
        const double th[3] = {8.25, 6.89, 36.68};
        Fixture f = make_case(name, U, th, 1.0, 341.0, 0.05, "published case table, third row");
        f.expected["re_p1"] = {0.0005, 1.0, "published participation factors"};
        f.expected["re_p2"] = {0.0019, 1.0, "published participation factors"};
        f.expected["re_p3"] = {0.497, 1.0, "published participation factors"};
        return f;
    }
    if (name == "case1-published-d") {
        // The operating matrix printed alongside the first case, taken
        // verbatim and realized with unit voltage phasors (U = 1 at angle 0,
        // S = 1/D leaves D and the zero set unchanged).
        Fixture f;
        f.name = name;
        f.reduced = nine_bus_net();
        const double mag[3] = {1.11, 1.11, 0.74};
        const double ang[3] = {-9.56, -23.08, 73.36};
        OperatingPoint op;
        for (int i = 0; i < 3; ++i) {
            const Complex D = std::polar(mag[i], deg(ang[i]));
            const Complex S = 1.0 / D;
            ConverterState c;
            c.bus = "vsc" + std::to_string(i + 1);
            c.U_pu = 1.0;
            c.theta_rad = 0.0;
            c.P_pu = S.real();
            c.Q_pu = S.imag();
            op.converters.push_back(c);
        }
        f.op = op;
        f.expected["z0_printed_rad_s"] = {640.0, 0.02, "printed dominant-zero value"};
        f.expected["z0_oracle_rad_s"] = {343.12, 0.001, "determinant-root oracle on the printed matrices"};
        f.notes.push_back("the printed matrix entries reproduce the third case's operating state "
                          "(angles match within 0.01 deg), and its dominant zero lands on the "
                          "third case's 341 rad/s rather than the printed 640");
        return f;
    }
    if (name == "droop-node1") {
        const double U[3] = {1.00, 1.05, 0.87};
        const double th[3] = {8.66, 6.94, 35.41};
        return make_droop(name, 0, U, th, 356.0);
    }
    if (name == "droop-node2") {
        const double U[3] = {1.05, 1.00, 0.89};
        const double th[3] = {8.31, 7.19, 33.70};
        return make_droop(name, 1, U, th, 387.0);
    }
    if (name == "droop-node3") {
        const double U[3] = {1.06, 1.06, 1.00};
        const double th[3] = {8.19, 6.81, 31.18};
        Fixture f = make_droop(name, 2, U, th, 863.0);
        f.expected["z0_oracle_reconstruction_rad_s"] =
            {1468.7, 0.001, "determinant-root oracle under the documented Q reconstruction"};
        f.notes.push_back("the published 863 rad/s needs a post-droop Q3 near 0.174 p.u. "
                          "(droop reference near 1.017 p.u.); with the documented unit-reference "
                          "reconstruction the oracle lands at 1468.7 rad/s");
        return f;
    }
    if (name == "didactic") {
        Fixture f;
        f.name = name;
        f.didactic_z = 0.01;
        f.didactic_rows = {{1.0, 10.0}, {0.1, 1.0}, {0.01, 0.1}, {0.001, 0.01}};
        f.expected["dominant_mode_Kp1_Ki10"] = {9979.99, 0.001, "published gain-sweep table"};
        f.expected["dominant_mode_Kp0.1_Ki1"] = {979.98, 0.001, "published gain-sweep table"};
        f.expected["dominant_mode_Kp0.01_Ki0.1"] = {79.98, 0.001, "published gain-sweep table"};
        f.expected["dominant_mode_Kp0.001_Ki0.01"] = {-0.0025, 0.001, "published gain-sweep table"};
        f.notes.push_back("the stable row's published dominant mode carries two significant "
                          "figures; the exact value is -0.0024834");
        return f;
    }
    if (name == "scalar") {
        Fixture f;
        f.name = name;
        ReducedNetwork net;
        net.node_order = {"vsc1"};
        net.B_r = Eigen::MatrixXd::Constant(1, 1, 1.0);
        net.omega0 = kOmega0;
        f.reduced = net;
        OperatingPoint op;
        ConverterState c;
        c.bus = "vsc1";
        c.U_pu = 1.0;
        c.theta_rad = 0.0;
        c.P_pu = 1.0 / std::sqrt(2.0);
        c.Q_pu = 0.0;
        op.converters.push_back(c);
        f.op = op;
        f.expected["sigma"] = {std::sqrt(2.0), 1e-12, "closed-form scalar case"};
        f.expected["z0_rad_s"] = {kOmega0, 1e-9, "closed-form scalar case"};
        return f;
    }
    if (name == "table6-lines") {
        // Raw line data of the modified nine-bus network; exercises the
        // reduction path but is not bound to a reduced-matrix target because
        // the external-grid attachment is not published.
        Fixture f;
        f.name = name;
        GridModel model;
        for (int b = 1; b <= 9; ++b) {
            Bus bus;
            bus.id = std::to_string(b);
            bus.role = b <= 3 ? BusRole::Converter : BusRole::Interior;
            model.buses.push_back(bus);
        }
        auto add = [&](int a, int b, double x) { model.branches.push_back({std::to_string(a), std::to_string(b), x}); };
        add(1, 5, 0.0411);
        add(4, 5, 0.0086);
        add(7, 8, 0.01065);
        add(2, 6, 0.0250);
        add(4, 6, 0.0181);
        add(6, 9, 0.00665);
        add(3, 7, 0.1510);
        add(5, 8, 0.01065);
        add(7, 9, 0.00665);
        model.omega0 = kOmega0;
        f.reduced = build_reduced(model);
        f.notes.push_back("pure-Laplacian reduction without a grounded external grid; no "
                          "reduced-matrix equality target");
        return f;
    }
    if (name.rfind("random-seed-", 0) == 0) {
        const std::string tail = name.substr(12);
        try {
            return random_fixture(std::stoull(tail));
        } catch (const std::exception&) {
            fail_input("load_fixture: bad seed in '" + name + "'");
        }
    }
    fail_input("load_fixture: unknown fixture '" + name + "'");
}

std::uint64_t Rng::next_u64() {
    // splitmix64; fully deterministic across platforms.
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::uniform(double lo, double hi) {
    const double u = double(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

int Rng::uniform_int(int lo, int hi) {
    return lo + int(next_u64() % std::uint64_t(hi - lo + 1));
}

Fixture random_fixture(std::uint64_t seed, int N) {
    Rng rng(seed);
    const int n = N > 0 ? N : rng.uniform_int(2, 5);

    // Symmetric diagonally dominant susceptance matrix with strictly
    // positive shunt margin: positive definite, passive-network shaped.
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double u = rng.uniform(0.1, 2.0);
            B(i, j) = -u;
            B(j, i) = -u;
        }
    for (int i = 0; i < n; ++i) {
        double offsum = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) offsum += -B(i, j);
        B(i, i) = offsum + rng.uniform(0.5, 8.0);
    }

    Fixture f;
    f.name = "random-seed-" + std::to_string(seed);
    ReducedNetwork net;
    net.B_r = B;
    net.omega0 = kOmega0;
    OperatingPoint op;
    for (int i = 0; i < n; ++i) {
        net.node_order.push_back("n" + std::to_string(i + 1));
        ConverterState c;
        c.bus = net.node_order.back();
        c.U_pu = rng.uniform(0.9, 1.1);
        c.theta_rad = rng.uniform(-0.5, 0.5);
        c.P_pu = rng.uniform(0.3, 1.2);
        c.Q_pu = rng.uniform(-0.4, 0.8);
        op.converters.push_back(c);
    }
    f.reduced = net;
    f.op = op;
    f.notes.push_back("deterministic random passive fixture, seed " + std::to_string(seed));
    return f;
}

} // namespace nmpz
