// Command implementations behind the command-line tool: exact-correlation
// queries, protocol Monte Carlo campaigns, bound-grid sweeps and the
// end-to-end dominance verification. Kept separate from main() so the
// commands can be driven from tests.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "afmp/bounds.hpp"
#include "afmp/correlations.hpp"
#include "afmp/protocols.hpp"

namespace afmp::cli {

// Raised on malformed configuration input; mapped to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    SpinHamiltonian model;
    // query
    int site_i = 0;
    int site_j = 4;
    Axis axis_a = Axis::Z;
    Axis axis_b = Axis::Z;
    double t1 = 0.0;
    double t2 = 1.0;
    std::string initial_state = "all_plus";  // all_up | all_plus | random
    // protocol
    std::string protocol_kind = "projective";  // rotation|projective|modified|deferred
    std::uint64_t shots = 10000;
    std::uint64_t seed = 20240817;
    double theta = M_PI / 2.0;
    AngleNoiseModel noise;
    // bound grid (defaults mirror the qualitative contour-plot ranges)
    double dt_min = 0.0;
    double dt_max = 4.0;
    int dt_steps = 81;
    int rho_min = 1;
    int rho_max = 20;
    // verify sweep
    std::vector<double> verify_dts = {0.1, 0.25, 0.5, 1.0};
    int verify_field_configs = 2;
    int verify_states = 3;
    double field_scale = 0.5;
    // output
    std::string out_path;  // empty -> stdout
    std::string format = "json";
    int threads = 1;
    // test hook: scales e_min before the dominance comparison
    double corrupt_bound_scale = 1.0;

    bool has_model = false;
    double u0 = 1.0;
    double rc = 1.0;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);
nlohmann::json config_to_json(const RunConfig& cfg);

// Build the query (model + initial state) described by the config.
CorrelationQuery make_query(const RunConfig& cfg);

// Exit codes: 0 success, 1 verification violations, 2 config parse
// failure, 3 guard/precondition violation. Commands write their output
// atomically (temp file + rename) or to stdout when no path is set.
int cmd_exact(const RunConfig& cfg);
int cmd_protocol(const RunConfig& cfg);
int cmd_bounds_grid(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);

}  // namespace afmp::cli
