#pragma once

#include "nmpz/fixtures.hpp"
#include "nmpz/network.hpp"
#include "nmpz/transfer_matrix.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nmpz {

/// Fixed 17-significant-digit float formatting; all CSV/JSON output goes
/// through this so identical inputs produce byte-identical files.
std::string fmt17(double x);

struct NetworkInput {
    std::optional<GridModel> model;     // buses/branches form
    std::optional<ReducedNetwork> reduced; // direct B_r form
};

NetworkInput parse_network_json(const std::string& text);
OperatingPoint parse_operating_point_json(const std::string& text);

/// Device-side Jacobian blocks, one 2x2 rational matrix per converter.
struct DeviceModel {
    std::vector<std::string> buses;
    std::vector<TransferMatrix> blocks; // 2x2 each
    std::vector<double> S_B;
};

DeviceModel parse_device_json(const std::string& text);

/// Aggregate per-converter blocks into the 2N x 2N device Jacobian with
/// capacity scaling, rows/cols ordered like the network Jacobian.
TransferMatrix build_device_jacobian(const DeviceModel& dev,
                                     const std::vector<std::string>& node_order);

std::string serialize_reduced(const ReducedNetwork& net);
std::string serialize_rational(const RationalFunction& r);
std::string serialize_fixture(const Fixture& f);
Fixture parse_fixture_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace nmpz
