#pragma once

#include "nmpz/network.hpp"
#include "nmpz/transfer_matrix.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nmpz {

struct ExpectedValue {
    double value = 0.0;
    double tol_rel = 0.0;
    std::string provenance; // required; the loader rejects untagged targets
};

struct DroopDirective {
    int node = 0; // 0-based converter index
    double gain = 0.0;
};

struct DidacticGainRow {
    double Kp = 0.0, Ki = 0.0;
};

/// Canonical test corpus binding published reference numbers to
/// machine-readable inputs. Network fixtures carry the reduced matrix
/// directly; the didactic fixture carries the 2x2 plant parameters.
struct Fixture {
    std::string name;
    std::optional<ReducedNetwork> reduced;
    std::optional<OperatingPoint> op;
    std::vector<DroopDirective> droop;
    std::map<std::string, ExpectedValue> expected;
    std::vector<std::string> notes;

    std::optional<double> didactic_z;
    std::vector<DidacticGainRow> didactic_rows;

    bool is_network() const { return reduced.has_value(); }
};

Fixture load_fixture(const std::string& name);
std::vector<std::string> fixture_names();

/// Deterministic random passive network fixture; N = 0 draws N in 2..5.
Fixture random_fixture(std::uint64_t seed, int N = 0);

/// The 2x2 didactic plant: [[5(1-s/z)/(s+10), 0.5/(s+20)],
///                          [0.5/(s+20),      5/(s+20)]].
TransferMatrix didactic_plant(double z);

/// PI controller with low-pass filter, (Kp + Ki/s) I2 / (0.05 s + 1).
TransferMatrix didactic_controller(double Kp, double Ki);

/// Loop gain J(s) K(s) of the didactic system.
TransferMatrix didactic_loop(double z, double Kp, double Ki);

/// Cross-platform deterministic uniforms on top of a 64-bit PRNG state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    std::uint64_t next_u64();
    double uniform(double lo, double hi);
    int uniform_int(int lo, int hi); // inclusive

private:
    std::uint64_t state_;
};

} // namespace nmpz
