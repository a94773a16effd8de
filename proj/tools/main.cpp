// Command-line front end: zero quantification, margin bounds and droop
// placement ranking from grid admittance data and steady-state injections.

#include "nmpz/cli.hpp"

#include <CLI11.hpp>

#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"NMP transmission-zero analysis for multi-converter grids"};
    app.require_subcommand(1);

    nmpz::RunConfig cfg;
    std::vector<std::string> droop_args;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--network", cfg.network_path, "network JSON (buses/branches or B_r)");
        sub->add_option("--op", cfg.op_path, "operating-point JSON");
        sub->add_option("--device", cfg.device_path, "device Jacobian JSON (2x2 blocks)");
        sub->add_option("--fixture", cfg.fixture, "built-in fixture name (see README)");
        sub->add_option("--grid-min", cfg.grid_min, "grid lower edge, rad/s");
        sub->add_option("--grid-max", cfg.grid_max, "grid upper edge, rad/s");
        sub->add_option("--grid-points", cfg.grid_points, "grid point count");
        sub->add_option("--droop", droop_args, "droop directive NODE=GAIN (repeatable)");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--tol-rel", cfg.tol_rel, "relative tolerance for verify");
        sub->add_option("--omega-c", cfg.omega_c, "characteristic frequency for the zero-only bound");
        sub->add_option("--kp", cfg.kp, "didactic controller Kp");
        sub->add_option("--ki", cfg.ki, "didactic controller Ki");
        sub->add_option("--zero", cfg.didactic_zero, "didactic plant zero location");
    };

    for (const char* name : {"reduce", "zeros", "direction", "bound", "rank", "sweep", "nyquist", "verify"})
        add_common(app.add_subcommand(name));

    CLI11_PARSE(app, argc, argv);
    cfg.command = app.get_subcommands().front()->get_name();

    for (const std::string& d : droop_args) {
        const auto eq = d.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: --droop expects NODE=GAIN, got '%s'\n", d.c_str());
            return 1;
        }
        try {
            cfg.droop.emplace_back(d.substr(0, eq), std::stod(d.substr(eq + 1)));
        } catch (const std::exception&) {
            std::fprintf(stderr, "error: bad gain in --droop '%s'\n", d.c_str());
            return 1;
        }
    }
    return nmpz::run(cfg);
}
