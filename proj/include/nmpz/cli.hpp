#pragma once

#include <string>
#include <utility>
#include <vector>

namespace nmpz {

/// Parsed command line. One command per invocation; file schemas follow the
/// network/device JSON conventions.
struct RunConfig {
    std::string command; // reduce|zeros|direction|bound|rank|sweep|nyquist|verify
    std::string network_path;
    std::string op_path;
    std::string device_path;
    std::string fixture;
    double grid_min = 0.0; // rad/s; 0 = auto
    double grid_max = 0.0;
    int grid_points = 0;
    std::vector<std::pair<std::string, double>> droop; // NODE=GAIN, bus id or 1-based index
    std::string out_dir = ".";
    std::string format = "csv"; // csv|json
    double tol_rel = 1e-6;
    double omega_c = 0.0; // for the zero-only bound path
    double kp = 5.0, ki = 30.0, didactic_zero = 60.0; // didactic loop parameters
};

/// Exit codes: 0 success, 1 input error, 2 numerical failure,
/// 3 verification failure.
int run(const RunConfig& config);

} // namespace nmpz
