#include "nmpz/io.hpp"

#include "nmpz/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace nmpz {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_input("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_input("cannot write file '" + path + "'");
    out << content;
}

namespace {

json parse(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail_input(std::string("malformed JSON in ") + what);
    return j;
}

Polynomial poly_from_json(const json& arr, const char* what) {
    if (!arr.is_array()) fail_input(std::string(what) + ": coefficient list expected");
    std::vector<Complex> c;
    for (const auto& e : arr) {
        if (e.is_number()) {
            c.emplace_back(e.get<double>(), 0.0);
        } else if (e.is_array() && e.size() == 2) {
            c.emplace_back(e[0].get<double>(), e[1].get<double>());
        } else {
            fail_input(std::string(what) + ": coefficient must be a number or [re, im]");
        }
    }
    return Polynomial(std::move(c));
}

RationalFunction rational_from_json(const json& j, const char* what) {
    if (!j.contains("num") || !j.contains("den"))
        fail_input(std::string(what) + ": rational entry needs num and den");
    return RationalFunction(poly_from_json(j["num"], what), poly_from_json(j["den"], what));
}

void append_poly(std::string& out, const Polynomial& p) {
    out += "[";
    const auto& c = p.coefficients();
    for (size_t i = 0; i < c.size(); ++i) {
        if (i) out += ",";
        out += "[" + fmt17(c[i].real()) + "," + fmt17(c[i].imag()) + "]";
    }
    if (c.empty()) out += "[0,0]";
    out += "]";
}

} // namespace

NetworkInput parse_network_json(const std::string& text) {
    json j = parse(text, "network file");
    NetworkInput in;
    const double omega0 = j.value("omega0_rad_s", 0.0);
    if (!(omega0 > 0.0)) fail_input("network file: omega0_rad_s must be positive");

    if (j.contains("B_r")) {
        ReducedNetwork net;
        net.omega0 = omega0;
        if (!j.contains("node_order")) fail_input("network file: B_r requires node_order");
        for (const auto& n : j["node_order"]) net.node_order.push_back(n.get<std::string>());
        const int n = int(net.node_order.size());
        const auto& rows = j["B_r"];
        if (int(rows.size()) != n) fail_input("network file: B_r row count mismatch");
        net.B_r.resize(n, n);
        for (int r = 0; r < n; ++r) {
            if (int(rows[size_t(r)].size()) != n) fail_input("network file: B_r is not square");
            for (int c = 0; c < n; ++c) net.B_r(r, c) = rows[size_t(r)][size_t(c)].get<double>();
        }
        if ((net.B_r - net.B_r.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + net.B_r.norm()))
            fail_input("network file: B_r must be symmetric");
        in.reduced = net;
        return in;
    }

    GridModel m;
    m.omega0 = omega0;
    if (!j.contains("buses")) fail_input("network file: buses missing");
    for (const auto& b : j["buses"]) {
        Bus bus;
        bus.id = b.at("id").get<std::string>();
        const std::string role = b.value("role", "converter");
        if (role == "converter")
            bus.role = BusRole::Converter;
        else if (role == "interior")
            bus.role = BusRole::Interior;
        else if (role == "slack")
            bus.role = BusRole::Slack;
        else
            fail_input("network file: unknown bus role '" + role + "'");
        m.buses.push_back(bus);
    }
    for (const auto& br : j.value("branches", json::array())) {
        m.branches.push_back({br.at("from").get<std::string>(), br.at("to").get<std::string>(),
                              br.at("x_pu").get<double>()});
    }
    in.model = m;
    return in;
}

OperatingPoint parse_operating_point_json(const std::string& text) {
    json j = parse(text, "operating-point file");
    OperatingPoint op;
    if (!j.contains("converters")) fail_input("operating-point file: converters missing");
    for (const auto& c : j["converters"]) {
        ConverterState s;
        s.bus = c.at("bus").get<std::string>();
        s.U_pu = c.at("U_pu").get<double>();
        s.theta_rad = c.at("theta_rad").get<double>();
        s.P_pu = c.at("P_pu").get<double>();
        s.Q_pu = c.at("Q_pu").get<double>();
        s.S_B = c.value("S_B", 1.0);
        op.converters.push_back(s);
    }
    return op;
}

DeviceModel parse_device_json(const std::string& text) {
    json j = parse(text, "device file");
    DeviceModel dev;
    if (!j.contains("converters")) fail_input("device file: converters missing");
    for (const auto& c : j["converters"]) {
        dev.buses.push_back(c.at("bus").get<std::string>());
        dev.S_B.push_back(c.value("S_B", 1.0));
        const auto& rows = c.at("Jvsc");
        if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2)
            fail_input("device file: Jvsc must be a 2x2 rational matrix");
        TransferMatrix blk(2, 2);
        for (int r = 0; r < 2; ++r)
            for (int cc = 0; cc < 2; ++cc)
                blk.at(r, cc) = rational_from_json(rows[size_t(r)][size_t(cc)], "device file");
        dev.blocks.push_back(blk);
    }
    return dev;
}

TransferMatrix build_device_jacobian(const DeviceModel& dev,
                                     const std::vector<std::string>& node_order) {
    const int n = int(node_order.size());
    TransferMatrix J(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        int k = -1;
        for (size_t b = 0; b < dev.buses.size(); ++b)
            if (dev.buses[b] == node_order[size_t(i)]) k = int(b);
        if (k < 0) fail_input("device file: no block for bus '" + node_order[size_t(i)] + "'");
        const RationalFunction sb = RationalFunction::constant(dev.S_B[size_t(k)]);
        J.at(i, i) = dev.blocks[size_t(k)].at(0, 0) * sb;
        J.at(i, n + i) = dev.blocks[size_t(k)].at(0, 1) * sb;
        J.at(n + i, i) = dev.blocks[size_t(k)].at(1, 0) * sb;
        J.at(n + i, n + i) = dev.blocks[size_t(k)].at(1, 1) * sb;
    }
    return J;
}

std::string serialize_rational(const RationalFunction& r) {
    std::string out = "{\"num\":";
    append_poly(out, r.num());
    out += ",\"den\":";
    append_poly(out, r.den());
    out += "}";
    return out;
}

std::string serialize_reduced(const ReducedNetwork& net) {
    std::string out = "{\n  \"omega0_rad_s\": " + fmt17(net.omega0) + ",\n  \"node_order\": [";
    for (size_t i = 0; i < net.node_order.size(); ++i) {
        if (i) out += ", ";
        out += "\"" + net.node_order[i] + "\"";
    }
    out += "],\n  \"B_r\": [\n";
    for (int r = 0; r < net.B_r.rows(); ++r) {
        out += "    [";
        for (int c = 0; c < net.B_r.cols(); ++c) {
            if (c) out += ", ";
            out += fmt17(net.B_r(r, c));
        }
        out += r + 1 < net.B_r.rows() ? "],\n" : "]\n";
    }
    out += "  ]\n}\n";
    return out;
}

std::string serialize_fixture(const Fixture& f) {
    std::string out = "{\n  \"name\": \"" + f.name + "\"";
    if (f.reduced) {
        out += ",\n  \"omega0_rad_s\": " + fmt17(f.reduced->omega0) + ",\n  \"node_order\": [";
        for (size_t i = 0; i < f.reduced->node_order.size(); ++i) {
            if (i) out += ", ";
            out += "\"" + f.reduced->node_order[i] + "\"";
        }
        out += "],\n  \"B_r\": [";
        for (int r = 0; r < f.reduced->B_r.rows(); ++r) {
            out += "[";
            for (int c = 0; c < f.reduced->B_r.cols(); ++c) {
                if (c) out += ", ";
                out += fmt17(f.reduced->B_r(r, c));
            }
            out += r + 1 < f.reduced->B_r.rows() ? "], " : "]";
        }
        out += "]";
    }
    if (f.op) {
        out += ",\n  \"converters\": [\n";
        for (size_t i = 0; i < f.op->converters.size(); ++i) {
            const ConverterState& c = f.op->converters[i];
            out += "    {\"bus\": \"" + c.bus + "\", \"U_pu\": " + fmt17(c.U_pu) +
                   ", \"theta_rad\": " + fmt17(c.theta_rad) + ", \"P_pu\": " + fmt17(c.P_pu) +
                   ", \"Q_pu\": " + fmt17(c.Q_pu) + ", \"S_B\": " + fmt17(c.S_B) + "}";
            if (i + 1 < f.op->converters.size()) out += ",";
            out += "\n";
        }
        out += "  ]";
    }
    if (!f.droop.empty()) {
        out += ",\n  \"droop\": [";
        for (size_t i = 0; i < f.droop.size(); ++i) {
            if (i) out += ", ";
            out += "{\"node\": " + std::to_string(f.droop[i].node) +
                   ", \"gain\": " + fmt17(f.droop[i].gain) + "}";
        }
        out += "]";
    }
    if (f.didactic_z) {
        out += ",\n  \"didactic\": {\"z\": " + fmt17(*f.didactic_z) + ", \"gains\": [";
        for (size_t i = 0; i < f.didactic_rows.size(); ++i) {
            if (i) out += ", ";
            out += "[" + fmt17(f.didactic_rows[i].Kp) + ", " + fmt17(f.didactic_rows[i].Ki) + "]";
        }
        out += "]}";
    }
    if (!f.expected.empty()) {
        out += ",\n  \"expected\": {\n";
        size_t i = 0;
        for (const auto& [key, e] : f.expected) {
            out += "    \"" + key + "\": {\"value\": " + fmt17(e.value) +
                   ", \"tol_rel\": " + fmt17(e.tol_rel) + ", \"provenance\": \"" + e.provenance +
                   "\"}";
            if (++i < f.expected.size()) out += ",";
            out += "\n";
        }
        out += "  }";
    }
    if (!f.notes.empty()) {
        out += ",\n  \"notes\": [";
        for (size_t i = 0; i < f.notes.size(); ++i) {
            if (i) out += ", ";
            out += "\"" + f.notes[i] + "\"";
        }
        out += "]";
    }
    out += "\n}\n";
    return out;
}

Fixture parse_fixture_json(const std::string& text) {
    json j = parse(text, "fixture file");
    Fixture f;
    f.name = j.value("name", "");
    if (j.contains("B_r")) {
        ReducedNetwork net;
        net.omega0 = j.at("omega0_rad_s").get<double>();
        for (const auto& n : j.at("node_order")) net.node_order.push_back(n.get<std::string>());
        const int n = int(net.node_order.size());
        net.B_r.resize(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) net.B_r(r, c) = j["B_r"][size_t(r)][size_t(c)].get<double>();
        f.reduced = net;
    }
    if (j.contains("converters")) {
        OperatingPoint op;
        for (const auto& c : j["converters"]) {
            ConverterState s;
            s.bus = c.at("bus").get<std::string>();
            s.U_pu = c.at("U_pu").get<double>();
            s.theta_rad = c.at("theta_rad").get<double>();
            s.P_pu = c.at("P_pu").get<double>();
            s.Q_pu = c.at("Q_pu").get<double>();
            s.S_B = c.value("S_B", 1.0);
            op.converters.push_back(s);
        }
        f.op = op;
    }
    for (const auto& d : j.value("droop", json::array()))
        f.droop.push_back({d.at("node").get<int>(), d.at("gain").get<double>()});
    if (j.contains("didactic")) {
        f.didactic_z = j["didactic"].at("z").get<double>();
        for (const auto& g : j["didactic"].value("gains", json::array()))
            f.didactic_rows.push_back({g[0].get<double>(), g[1].get<double>()});
    }
    if (j.contains("expected")) {
        for (auto it = j["expected"].begin(); it != j["expected"].end(); ++it) {
            ExpectedValue e;
            e.value = it.value().at("value").get<double>();
            e.tol_rel = it.value().at("tol_rel").get<double>();
            e.provenance = it.value().value("provenance", "");
            if (e.provenance.empty())
                fail_input("fixture file: expected value '" + it.key() + "' lacks a provenance tag");
            f.expected[it.key()] = e;
        }
    }
    for (const auto& n : j.value("notes", json::array())) f.notes.push_back(n.get<std::string>());
    return f;
}

} // namespace nmpz
