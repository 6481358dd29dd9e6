#include "afmp/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace afmp {

namespace {

// Stream ids: shot index in the low bits, campaign tag in the top bits, so
// streams never collide between campaigns.
std::uint64_t stream_id(std::uint64_t shot, std::uint64_t campaign) {
    return shot | (campaign << 56);
}

void parallel_shots(std::uint64_t shots, int n_threads,
                    const std::function<void(std::uint64_t, std::uint64_t)>& body) {
    if (n_threads < 1) n_threads = 1;
    if (n_threads == 1 || shots < 256) {
        body(0, shots);
        return;
    }
    std::vector<std::thread> workers;
    const std::uint64_t chunk = (shots + n_threads - 1) / n_threads;
    for (int w = 0; w < n_threads; ++w) {
        const std::uint64_t begin = w * chunk;
        const std::uint64_t end = std::min(shots, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& t : workers) t.join();
}

// Sequential Welford pass over per-shot values: mean and sample std.
std::pair<double, double> mean_and_sample_std(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double var = v.size() > 1 ? ss / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var)};
}

Eigen::Matrix2cd rotation_gate(Axis axis, double theta) {
    return std::cos(0.5 * theta) * Eigen::Matrix2cd::Identity() -
           cplx(0.0, 1.0) * std::sin(0.5 * theta) * pauli_matrix(axis);
}

}  // namespace

void AngleNoiseModel::validate() const {
    if (sigma < 0.0) throw std::invalid_argument("noise sigma must be >= 0");
    if (kind == Kind::None && (delta != 0.0 || sigma != 0.0))
        throw std::invalid_argument("noise kind none implies delta = sigma = 0");
}

AngleNoiseModel AngleNoiseModel::systematic(double delta) {
    AngleNoiseModel m;
    m.kind = Kind::Systematic;
    m.delta = delta;
    return m;
}

AngleNoiseModel AngleNoiseModel::statistical(double sigma) {
    AngleNoiseModel m;
    m.kind = Kind::Statistical;
    m.sigma = sigma;
    return m;
}

double sample_noisy_angle(double theta, const AngleNoiseModel& noise,
                          CounterRng& rng) {
    noise.validate();
    switch (noise.kind) {
        case AngleNoiseModel::Kind::Systematic: return theta + noise.delta;
        case AngleNoiseModel::Kind::Statistical: return theta + rng.normal(noise.sigma);
        default: return theta;
    }
}

ProtocolResult run_rotation_protocol(const CorrelationQuery& q, double theta,
                                     const AngleNoiseModel& noise,
                                     std::uint64_t shots, std::uint64_t seed,
                                     int n_threads) {
    q.validate();
    noise.validate();
    if (shots < 1) throw std::invalid_argument("shots must be >= 1");
    const double sin_theta = std::sin(theta);
    if (std::abs(sin_theta) < 1e-6)
        throw std::invalid_argument("rotation protocol: sin(theta) degenerate");

    const QueryCaches caches = make_query_caches(q);
    Vector psi1 = q.initial_state.amplitudes;
    evolve_inplace(psi1, caches.h, q.t1, Sign::Forward);
    const int n = q.hamiltonian.n_sites;

    // campaign 0: +theta, campaign 1: -theta
    std::vector<std::vector<double>> outcomes(2, std::vector<double>(shots));
    std::vector<std::map<std::pair<int, int>, std::uint64_t>> tallies(2);
    for (int c = 0; c < 2; ++c) {
        const double base = (c == 0) ? theta : -theta;
        auto body = [&, c, base](std::uint64_t begin, std::uint64_t end) {
            for (std::uint64_t s = begin; s < end; ++s) {
                CounterRng rng(seed, stream_id(s, static_cast<std::uint64_t>(c)));
                const double angle = sample_noisy_angle(base, noise, rng);
                QuantumState state{n, psi1};
                apply_single_site(rotation_gate(q.o1.axis, angle), q.o1.site, n,
                                  state.amplitudes);
                evolve_inplace(state.amplitudes, caches.h, q.dt(), Sign::Forward);
                const BornSample sample = born_sample(state, q.o2, rng);
                outcomes[c][s] = sample.eigenvalue;
            }
        };
        parallel_shots(shots, n_threads, body);
        // deterministic tally pass
        const int campaign_sign = (c == 0) ? +1 : -1;
        for (std::uint64_t s = 0; s < shots; ++s)
            tallies[c][{campaign_sign, outcomes[c][s] > 0 ? +1 : -1}]++;
    }

    const auto [mean_plus, std_plus] = mean_and_sample_std(outcomes[0]);
    const auto [mean_minus, std_minus] = mean_and_sample_std(outcomes[1]);

    ProtocolResult result;
    result.seed = seed;
    result.shots = 2 * shots;
    result.estimate = (mean_minus - mean_plus) / (2.0 * sin_theta);
    const double nshots = static_cast<double>(shots);
    result.std_error = std::sqrt(std_plus * std_plus / nshots +
                                 std_minus * std_minus / nshots) /
                       (2.0 * std::abs(sin_theta));
    result.outcome_tallies = tallies[0];
    for (const auto& [k, v] : tallies[1]) result.outcome_tallies[k] += v;
    return result;
}

ProtocolResult run_projective_protocol(const CorrelationQuery& q,
                                       std::uint64_t shots, std::uint64_t seed,
                                       const SpinHamiltonian* modified,
                                       bool deferred, int n_threads) {
    q.validate();
    if (shots < 1) throw std::invalid_argument("shots must be >= 1");
    if (deferred && !modified)
        throw std::invalid_argument("deferred protocol requires a modified Hamiltonian");

    const QueryCaches caches = make_query_caches(q, modified);
    const EvolutionCache& window = modified ? *caches.h_prime : caches.h;
    Vector psi1 = q.initial_state.amplitudes;
    evolve_inplace(psi1, caches.h, q.t1, Sign::Forward);
    const int n = q.hamiltonian.n_sites;
    const Observable o1 = PauliObservable{q.o1.site, q.o1.axis};

    std::vector<double> products(shots);
    std::vector<std::pair<int, int>> keys(shots);
    auto body = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t s = begin; s < end; ++s) {
            CounterRng rng(seed, stream_id(s, 2));
            QuantumState state{n, psi1};
            double nu;
            if (!deferred) {
                BornSample first = born_sample(state, o1, rng);
                nu = first.eigenvalue;
                state = std::move(first.post_state);
                evolve_inplace(state.amplitudes, window, q.dt(), Sign::Forward);
            } else {
                evolve_inplace(state.amplitudes, window, q.dt(), Sign::Forward);
                BornSample first = born_sample(state, o1, rng);
                nu = first.eigenvalue;
                state = std::move(first.post_state);
            }
            const BornSample second = born_sample(state, q.o2, rng);
            products[s] = nu * second.eigenvalue;
            keys[s] = {nu > 0 ? +1 : -1, second.eigenvalue > 0 ? +1 : -1};
        }
    };
    parallel_shots(shots, n_threads, body);

    const auto [mean, std_dev] = mean_and_sample_std(products);
    ProtocolResult result;
    result.seed = seed;
    result.shots = shots;
    result.estimate = mean;
    result.std_error = std_dev / std::sqrt(static_cast<double>(shots));
    for (std::uint64_t s = 0; s < shots; ++s) result.outcome_tallies[keys[s]]++;
    return result;
}

}  // namespace afmp
