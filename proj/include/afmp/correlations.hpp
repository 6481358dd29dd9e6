// Exact expectation-level correlation quantities: the two-time function
// C(t1,t2), the rotation-protocol observables, the projective and
// modified-projective correlations, the deferred-measurement variant, and
// the exact error quantities that the analytic bounds must dominate.
//
// Everything here is dense linear algebra with no shot noise; Monte Carlo
// emulation of the same quantities lives in protocols.hpp.

#pragma once

#include <optional>

#include "afmp/hamiltonian.hpp"
#include "afmp/quantum.hpp"

namespace afmp {

struct CorrelationQuery {
    QuantumState initial_state;
    SpinHamiltonian hamiltonian;
    PauliObservable o1;  // sigma_i^a, measured/rotated at t1
    Observable o2;       // measured at t2; support disjoint from site i
    double t1 = 0.0;
    double t2 = 0.0;

    double dt() const { return t2 - t1; }
    // Shortest 1-norm distance between site i and supp(O2).
    int rho() const;
    void validate() const;
};

// Shared eigendecompositions for a query; reusable across many calls with
// the same Hamiltonian pair.
struct QueryCaches {
    EvolutionCache h;                        // original Hamiltonian
    std::optional<EvolutionCache> h_prime;   // modified window Hamiltonian
};

QueryCaches make_query_caches(const CorrelationQuery& q,
                              const SpinHamiltonian* h_prime = nullptr);

// <psi| sigma_i^a(t1) O2(t2) |psi>, complex in general.
cplx exact_two_time(const CorrelationQuery& q);
cplx exact_two_time(const CorrelationQuery& q, const EvolutionCache& cache);

// U(t2-t1) e^{-i theta sigma_i^a / 2} U(t1) |psi>.
QuantumState rotated_state(const CorrelationQuery& q, double theta);
QuantumState rotated_state(const CorrelationQuery& q, double theta,
                           const EvolutionCache& cache);

// E_theta = <O2> in the rotated state.
double rotation_expectation(const CorrelationQuery& q, double theta);
double rotation_expectation(const CorrelationQuery& q, double theta,
                            const EvolutionCache& cache);

// (E_{-theta} - E_{theta}) / (2 sin theta); requires |sin theta| >= 1e-6.
double im_c_from_rotations(const CorrelationQuery& q, double theta);
double im_c_from_rotations(const CorrelationQuery& q, double theta,
                           const EvolutionCache& cache);

// Sum_omega omega (P(+,omega) - P(-,omega)); equals Re C exactly.
double projective_correlation(const CorrelationQuery& q);
double projective_correlation(const CorrelationQuery& q,
                              const EvolutionCache& cache);

// Projective correlation with the t1..t2 window evolved under h_prime.
double modified_projective_correlation(const CorrelationQuery& q,
                                       const SpinHamiltonian& h_prime);
double modified_projective_correlation(const CorrelationQuery& q,
                                       const QueryCaches& caches);

// Decoupled-at-t1, measured-at-t2 variant with joint probabilities.
double deferred_correlation(const CorrelationQuery& q,
                            const SpinHamiltonian& h_prime);
double deferred_correlation(const CorrelationQuery& q,
                            const QueryCaches& caches);

// <2> - <1> = <sigma(t1) O2(t2) sigma(t1)> - <O2(t2)>.
double scaling_term(const CorrelationQuery& q);
double scaling_term(const CorrelationQuery& q, const EvolutionCache& cache);

// || [O2(dt), sigma_i^a] || with O2 evolved under the query Hamiltonian.
double commutator_norm(const CorrelationQuery& q);
double commutator_norm(const CorrelationQuery& q, const EvolutionCache& cache);

// |C_H - C_{H,H'}|, the exact protocol error the bounds must dominate.
double epsilon_actual(const CorrelationQuery& q, const SpinHamiltonian& h_prime);
double epsilon_actual(const CorrelationQuery& q, const QueryCaches& caches);

}  // namespace afmp
