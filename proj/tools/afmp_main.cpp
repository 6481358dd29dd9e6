// Command-line surface: exact-correlation queries, protocol Monte Carlo
// campaigns, bound-grid sweeps and the end-to-end verification run.
//
// Exit codes: 0 success, 1 verification violations, 2 config parse
// failure, 3 guard/precondition violation.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "afmp/cli.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<double> u0, rc, dt_max, theta, noise_sigma, noise_delta;
    std::optional<int> rho_max;
    std::optional<std::uint64_t> shots;
    bool corrupt_bounds = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON run configuration");
    cmd->add_option("--out", flags.out_path, "output file (default: stdout)");
    cmd->add_option("--seed", flags.seed, "RNG seed");
    cmd->add_option("--threads", flags.threads, "worker threads");
    cmd->add_option("--u0", flags.u0, "Rydberg saturation energy");
    cmd->add_option("--rc", flags.rc, "soft-core radius");
    cmd->add_option("--dt-max", flags.dt_max, "grid dt upper limit");
    cmd->add_option("--rho-max", flags.rho_max, "grid rho upper limit");
    cmd->add_option("--shots", flags.shots, "Monte Carlo shots");
    cmd->add_option("--theta", flags.theta, "rotation angle (radians)");
    cmd->add_option("--noise-sigma", flags.noise_sigma,
                    "statistical angle jitter std deviation");
    cmd->add_option("--noise-delta", flags.noise_delta,
                    "systematic angle offset");
    cmd->add_flag("--corrupt-bounds", flags.corrupt_bounds)->group("");
}

afmp::cli::RunConfig build_config(const CommonFlags& flags) {
    afmp::cli::RunConfig cfg =
        flags.config_path.empty()
            ? afmp::cli::parse_config(nlohmann::json::object())
            : afmp::cli::load_config_file(flags.config_path);
    if (!flags.out_path.empty()) cfg.out_path = flags.out_path;
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.threads) cfg.threads = *flags.threads;
    if (flags.u0) cfg.u0 = *flags.u0;
    if (flags.rc) cfg.rc = *flags.rc;
    if (flags.dt_max) cfg.dt_max = *flags.dt_max;
    if (flags.rho_max) cfg.rho_max = *flags.rho_max;
    if (flags.shots) cfg.shots = *flags.shots;
    if (flags.theta) cfg.theta = *flags.theta;
    if (flags.noise_sigma)
        cfg.noise = afmp::AngleNoiseModel::statistical(*flags.noise_sigma);
    if (flags.noise_delta)
        cfg.noise = afmp::AngleNoiseModel::systematic(*flags.noise_delta);
    if (flags.corrupt_bounds) cfg.corrupt_bound_scale = 1e-6;
    if ((flags.u0 || flags.rc) && !cfg.has_model) {
        afmp::RydbergModelSpec spec;
        spec.n_sites = cfg.model.n_sites;
        spec.u0 = cfg.u0;
        spec.rc = cfg.rc;
        cfg.model = afmp::build_rydberg_chain(spec);
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ancilla-free two-time correlation toolkit"};
    app.require_subcommand(1);

    CommonFlags exact_flags, protocol_flags, grid_flags, verify_flags;
    CLI::App* exact = app.add_subcommand("exact", "exact correlation query");
    add_common(exact, exact_flags);
    CLI::App* protocol = app.add_subcommand("protocol", "Monte Carlo protocol run");
    add_common(protocol, protocol_flags);
    CLI::App* grid = app.add_subcommand("bounds-grid", "bound grid CSV sweep");
    add_common(grid, grid_flags);
    CLI::App* verify =
        app.add_subcommand("verify", "certify exact errors against the bounds");
    add_common(verify, verify_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (exact->parsed()) return afmp::cli::cmd_exact(build_config(exact_flags));
        if (protocol->parsed())
            return afmp::cli::cmd_protocol(build_config(protocol_flags));
        if (grid->parsed())
            return afmp::cli::cmd_bounds_grid(build_config(grid_flags));
        if (verify->parsed())
            return afmp::cli::cmd_verify(build_config(verify_flags));
    } catch (const afmp::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
