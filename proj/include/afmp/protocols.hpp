// Shot-by-shot Monte Carlo emulation of the measurement protocols:
// the rotation protocol for Im C, the projective protocol for Re C, the
// modified protocol with the measured site decoupled during the t1..t2
// window, and the deferred variant with both measurements at t2.
//
// Every shot owns a counter-based RNG stream derived from (seed, shot
// index), so results are bit-identical for a given seed regardless of the
// number of worker threads.

#pragma once

#include <cstdint>
#include <map>
#include <utility>

#include "afmp/correlations.hpp"
#include "afmp/rng.hpp"

namespace afmp {

struct AngleNoiseModel {
    enum class Kind { None, Systematic, Statistical };
    Kind kind = Kind::None;
    double delta = 0.0;  // systematic offset, radians
    double sigma = 0.0;  // std deviation of Gaussian jitter, radians

    void validate() const;
    static AngleNoiseModel none() { return {}; }
    static AngleNoiseModel systematic(double delta);
    static AngleNoiseModel statistical(double sigma);
};

// theta + delta, theta + N(0, sigma^2), or theta unchanged.
double sample_noisy_angle(double theta, const AngleNoiseModel& noise,
                          CounterRng& rng);

struct ProtocolResult {
    double estimate = 0.0;
    std::uint64_t shots = 0;  // total Born-sampled runs tallied
    double std_error = 0.0;
    // Rotation protocol: key = (campaign sign, outcome sign).
    // Projective protocols: key = (nu, sign of omega).
    std::map<std::pair<int, int>, std::uint64_t> outcome_tallies;
    std::uint64_t seed = 0;
};

// Steps (a)-(d) of the rotation protocol: equal-size campaigns at +theta
// and -theta (shots each, 2*shots total), per-shot noisy angles, Born
// sampling of O2, estimate (E_-theta - E_theta)/(2 sin theta).
ProtocolResult run_rotation_protocol(const CorrelationQuery& q, double theta,
                                     const AngleNoiseModel& noise,
                                     std::uint64_t shots, std::uint64_t seed,
                                     int n_threads = 1);

// Projective protocol steps (a)-(e); with `modified` set the t1..t2 window
// evolves under the decoupled Hamiltonian, and with deferred=true the
// sigma_i^a measurement happens at t2 alongside O2.
ProtocolResult run_projective_protocol(const CorrelationQuery& q,
                                       std::uint64_t shots, std::uint64_t seed,
                                       const SpinHamiltonian* modified = nullptr,
                                       bool deferred = false, int n_threads = 1);

}  // namespace afmp
