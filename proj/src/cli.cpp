#include "afmp/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace afmp::cli {

namespace {

// Atomic write: temp file in the same directory, then rename, so a failed
// command never leaves a partial output file behind.
void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    const std::filesystem::path target(path);
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open output file: " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", x);
    return buf;
}

QuantumState make_initial_state(const RunConfig& cfg) {
    const int n = cfg.model.n_sites;
    if (cfg.initial_state == "all_up") return QuantumState::all_up(n);
    if (cfg.initial_state == "all_plus") return QuantumState::all_plus(n);
    if (cfg.initial_state == "random") {
        CounterRng rng(cfg.seed, 0x5eedULL);
        return QuantumState::random(n, rng);
    }
    throw ConfigError("unknown initial_state: " + cfg.initial_state);
}

AngleNoiseModel parse_noise(const nlohmann::json& j) {
    const std::string kind = j.value("kind", "none");
    if (kind == "none") return AngleNoiseModel::none();
    if (kind == "systematic")
        return AngleNoiseModel::systematic(j.value("delta", 0.0));
    if (kind == "statistical")
        return AngleNoiseModel::statistical(j.value("sigma", 0.0));
    throw ConfigError("unknown noise kind: " + kind);
}

SpinHamiltonian default_model() {
    RydbergModelSpec spec;
    spec.n_sites = 8;
    spec.u0 = 1.0;
    spec.rc = 1.0;
    return build_rydberg_chain(spec);
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j) {
    RunConfig cfg;
    try {
        if (j.contains("model")) {
            cfg.model = hamiltonian_from_json(j.at("model"));
            cfg.has_model = true;
            cfg.u0 = j.at("model").value("u0", 1.0);
            cfg.rc = j.at("model").value("rc", 1.0);
        } else {
            cfg.model = default_model();
        }
        if (j.contains("query")) {
            const auto& q = j.at("query");
            cfg.site_i = q.value("site_i", cfg.site_i);
            cfg.site_j = q.value("site_j", cfg.site_j);
            cfg.axis_a = axis_from_string(q.value("axis_a", "z"));
            cfg.axis_b = axis_from_string(q.value("axis_b", "z"));
            cfg.t1 = q.value("t1", cfg.t1);
            cfg.t2 = q.value("t2", cfg.t2);
            cfg.initial_state = q.value("initial_state", cfg.initial_state);
        }
        if (j.contains("protocol")) {
            const auto& p = j.at("protocol");
            cfg.protocol_kind = p.value("kind", cfg.protocol_kind);
            cfg.shots = p.value("shots", cfg.shots);
            cfg.seed = p.value("seed", cfg.seed);
            cfg.theta = p.value("theta", cfg.theta);
            if (p.contains("noise")) cfg.noise = parse_noise(p.at("noise"));
        }
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            cfg.dt_min = g.value("dt_min", cfg.dt_min);
            cfg.dt_max = g.value("dt_max", cfg.dt_max);
            cfg.dt_steps = g.value("dt_steps", cfg.dt_steps);
            cfg.rho_min = g.value("rho_min", cfg.rho_min);
            cfg.rho_max = g.value("rho_max", cfg.rho_max);
        }
        if (j.contains("verify")) {
            const auto& v = j.at("verify");
            if (v.contains("dts"))
                cfg.verify_dts = v.at("dts").get<std::vector<double>>();
            cfg.verify_field_configs =
                v.value("field_configs", cfg.verify_field_configs);
            cfg.verify_states = v.value("states", cfg.verify_states);
            cfg.field_scale = v.value("field_scale", cfg.field_scale);
        }
        if (j.contains("output")) {
            cfg.out_path = j.at("output").value("path", cfg.out_path);
            cfg.format = j.at("output").value("format", cfg.format);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse failure: ") + e.what());
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["model"] = hamiltonian_to_json(cfg.model);
    j["query"] = {{"site_i", cfg.site_i},
                  {"site_j", cfg.site_j},
                  {"axis_a", axis_to_string(cfg.axis_a)},
                  {"axis_b", axis_to_string(cfg.axis_b)},
                  {"t1", cfg.t1},
                  {"t2", cfg.t2},
                  {"initial_state", cfg.initial_state}};
    nlohmann::json noise;
    switch (cfg.noise.kind) {
        case AngleNoiseModel::Kind::Systematic:
            noise = {{"kind", "systematic"}, {"delta", cfg.noise.delta}};
            break;
        case AngleNoiseModel::Kind::Statistical:
            noise = {{"kind", "statistical"}, {"sigma", cfg.noise.sigma}};
            break;
        default:
            noise = {{"kind", "none"}};
    }
    j["protocol"] = {{"kind", cfg.protocol_kind},
                     {"shots", cfg.shots},
                     {"seed", cfg.seed},
                     {"theta", cfg.theta},
                     {"noise", noise}};
    j["grid"] = {{"dt_min", cfg.dt_min},
                 {"dt_max", cfg.dt_max},
                 {"dt_steps", cfg.dt_steps},
                 {"rho_min", cfg.rho_min},
                 {"rho_max", cfg.rho_max}};
    j["output"] = {{"path", cfg.out_path}, {"format", cfg.format}};
    return j;
}

CorrelationQuery make_query(const RunConfig& cfg) {
    CorrelationQuery q;
    q.hamiltonian = cfg.model;
    q.initial_state = make_initial_state(cfg);
    q.o1 = PauliObservable{cfg.site_i, cfg.axis_a};
    q.o2 = PauliObservable{cfg.site_j, cfg.axis_b};
    q.t1 = cfg.t1;
    q.t2 = cfg.t2;
    q.validate();
    return q;
}

int cmd_exact(const RunConfig& cfg) {
    const CorrelationQuery q = make_query(cfg);
    const SpinHamiltonian h_prime = decouple_site(cfg.model, cfg.site_i);
    const QueryCaches caches = make_query_caches(q, &h_prime);

    const cplx c = exact_two_time(q, caches.h);
    nlohmann::json out;
    out["re_c"] = c.real();
    out["im_c"] = c.imag();
    out["c_tilde_modified"] = modified_projective_correlation(q, caches);
    out["epsilon_actual"] = epsilon_actual(q, caches);
    write_output(cfg.out_path, out.dump(2) + "\n");
    return 0;
}

int cmd_protocol(const RunConfig& cfg) {
    const CorrelationQuery q = make_query(cfg);
    ProtocolResult result;
    if (cfg.protocol_kind == "rotation") {
        result = run_rotation_protocol(q, cfg.theta, cfg.noise, cfg.shots,
                                       cfg.seed, cfg.threads);
    } else if (cfg.protocol_kind == "projective") {
        result = run_projective_protocol(q, cfg.shots, cfg.seed, nullptr,
                                         false, cfg.threads);
    } else if (cfg.protocol_kind == "modified" ||
               cfg.protocol_kind == "deferred") {
        const SpinHamiltonian h_prime = decouple_site(cfg.model, cfg.site_i);
        result = run_projective_protocol(q, cfg.shots, cfg.seed, &h_prime,
                                         cfg.protocol_kind == "deferred",
                                         cfg.threads);
    } else {
        throw ConfigError("unknown protocol kind: " + cfg.protocol_kind);
    }

    nlohmann::json out;
    out["protocol"] = cfg.protocol_kind;
    out["estimate"] = result.estimate;
    out["shots"] = result.shots;
    out["std_error"] = result.std_error;
    out["seed"] = result.seed;
    nlohmann::json tallies = nlohmann::json::object();
    for (const auto& [key, count] : result.outcome_tallies) {
        const std::string name = std::string(key.first > 0 ? "+" : "-") + "," +
                                 (key.second > 0 ? "+" : "-");
        tallies[name] = count;
    }
    out["outcome_tallies"] = tallies;
    write_output(cfg.out_path, out.dump(2) + "\n");
    return 0;
}

int cmd_bounds_grid(const RunConfig& cfg) {
    if (cfg.rho_min < 1) throw std::invalid_argument("rho_min must be >= 1");
    if (cfg.dt_max < cfg.dt_min || cfg.dt_min < 0.0)
        throw std::invalid_argument("grid requires dt_max >= dt_min >= 0");
    if (cfg.dt_steps < 1) throw std::invalid_argument("dt_steps must be >= 1");
    const BoundParams params = BoundParams::make(cfg.u0, cfg.rc);

    std::ostringstream csv;
    csv << "dt,rho,e_full,e_naive,e_trivial,e_min\n";
    for (int step = 0; step < cfg.dt_steps; ++step) {
        const double dt =
            cfg.dt_steps == 1
                ? cfg.dt_min
                : cfg.dt_min + (cfg.dt_max - cfg.dt_min) * step / (cfg.dt_steps - 1);
        for (int rho = cfg.rho_min; rho <= cfg.rho_max; ++rho) {
            const BoundGridPoint pt =
                cfg.has_model
                    ? combined_bound(dt, rho, params, cfg.model, cfg.site_i, 1.0)
                    : combined_bound_infinite(dt, rho, params, 1.0);
            csv << fmt_double(pt.dt) << ',' << pt.rho << ','
                << fmt_double(pt.e_full) << ',' << fmt_double(pt.e_naive) << ','
                << fmt_double(pt.e_trivial) << ',' << fmt_double(pt.e_min)
                << '\n';
        }
    }
    write_output(cfg.out_path, csv.str());
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    const int n = cfg.model.n_sites;
    check_site_count(n);
    const BoundParams params = BoundParams::make(cfg.u0, cfg.rc);
    const int site_i = cfg.site_i;
    const int rho_max = std::min(cfg.rho_max, n - 1 - site_i);
    if (rho_max < 1) throw std::invalid_argument("verify: no valid rho range");

    struct Violation {
        double dt;
        int rho;
        double eps, bound;
        const char* kind;
    };
    std::vector<Violation> violations;
    double max_ratio = 0.0;
    std::ostringstream report;
    report << "dt,rho,field_config,state,epsilon,e_min,comm_norm,matsuta_b\n";

    for (int fc = 0; fc < cfg.verify_field_configs; ++fc) {
        SpinHamiltonian h = cfg.model;
        if (!cfg.has_model || cfg.verify_field_configs > 1) {
            CounterRng rng(cfg.seed, 0xF1E1D0ULL + static_cast<std::uint64_t>(fc));
            for (auto& f : h.fields)
                f = Eigen::Vector3d(cfg.field_scale * (2.0 * rng.uniform() - 1.0),
                                    cfg.field_scale * (2.0 * rng.uniform() - 1.0),
                                    cfg.field_scale * (2.0 * rng.uniform() - 1.0));
        }
        const SpinHamiltonian h_prime = decouple_site(h, site_i);
        const EvolutionCache cache_h = make_evolution_cache(to_dense(h));
        const EvolutionCache cache_hp = make_evolution_cache(to_dense(h_prime));
        QueryCaches caches;
        caches.h = cache_h;
        caches.h_prime = cache_hp;

        std::vector<QuantumState> states;
        for (int s = 0; s < cfg.verify_states; ++s) {
            CounterRng rng(cfg.seed, 0x57A7EULL + 64ULL * fc + static_cast<std::uint64_t>(s));
            states.push_back(QuantumState::random(n, rng));
        }

        for (double dt : cfg.verify_dts) {
            for (int rho = cfg.rho_min; rho <= rho_max; ++rho) {
                CorrelationQuery q;
                q.hamiltonian = h;
                q.o1 = PauliObservable{site_i, cfg.axis_a};
                q.o2 = PauliObservable{site_i + rho, cfg.axis_b};
                q.t1 = cfg.t1;
                q.t2 = cfg.t1 + dt;
                BoundGridPoint pt =
                    combined_bound(dt, rho, params, h, site_i, 1.0);
                pt.e_min *= cfg.corrupt_bound_scale;
                q.initial_state = states.front();
                const double comm = commutator_norm(q, cache_h);
                const double matsuta =
                    matsuta_commutator_bound(dt, rho, params, 1.0, 1, 1.0);
                if (comm > matsuta)
                    violations.push_back({dt, rho, comm, matsuta, "commutator"});
                for (int s = 0; s < static_cast<int>(states.size()); ++s) {
                    q.initial_state = states[static_cast<std::size_t>(s)];
                    const double eps = epsilon_actual(q, caches);
                    // 1e-12 absolute slack absorbs round-off at dt = 0,
                    // where both sides are exactly zero analytically
                    if (eps > pt.e_min + 1e-12)
                        violations.push_back({dt, rho, eps, pt.e_min, "dominance"});
                    if (pt.e_min > 1e-15)
                        max_ratio = std::max(max_ratio, eps / pt.e_min);
                    report << fmt_double(dt) << ',' << rho << ',' << fc << ','
                           << s << ',' << fmt_double(eps) << ','
                           << fmt_double(pt.e_min) << ',' << fmt_double(comm)
                           << ',' << fmt_double(matsuta) << '\n';
                }
            }
        }
    }

    std::ostringstream summary;
    summary << "max_ratio_eps_over_emin=" << fmt_double(max_ratio) << "\n"
            << "violations=" << violations.size() << "\n";
    for (const auto& v : violations)
        summary << "violation kind=" << v.kind << " dt=" << fmt_double(v.dt)
                << " rho=" << v.rho << " value=" << fmt_double(v.eps)
                << " bound=" << fmt_double(v.bound) << "\n";
    write_output(cfg.out_path, summary.str() + report.str());
    std::cerr << summary.str();
    return violations.empty() ? 0 : 1;
}

}  // namespace afmp::cli
