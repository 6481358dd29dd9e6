#include "afmp/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace afmp {

namespace {

// cos(theta/2) I - i sin(theta/2) sigma_a
Eigen::Matrix2cd rotation_gate(Axis axis, double theta) {
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    return std::cos(0.5 * theta) * id -
           cplx(0.0, 1.0) * std::sin(0.5 * theta) * pauli_matrix(axis);
}

Vector state_at_t1(const CorrelationQuery& q, const EvolutionCache& cache) {
    Vector v = q.initial_state.amplitudes;
    evolve_inplace(v, cache, q.t1, Sign::Forward);
    return v;
}

double real_expect(const Vector& v, const Observable& obs, int n_sites) {
    Vector w = v;
    apply_local(observable_matrix(obs), observable_support(obs), n_sites, w);
    return (v.adjoint() * w)(0, 0).real();
}

}  // namespace

int CorrelationQuery::rho() const {
    int best = hamiltonian.n_sites;
    for (int s : observable_support(o2))
        best = std::min(best, std::abs(s - o1.site));
    return best;
}

void CorrelationQuery::validate() const {
    hamiltonian.validate();
    if (initial_state.n_sites != hamiltonian.n_sites)
        throw std::invalid_argument("state/Hamiltonian size mismatch");
    if (o1.site < 0 || o1.site >= hamiltonian.n_sites)
        throw std::invalid_argument("o1 site out of range");
    for (int s : observable_support(o2)) {
        if (s < 0 || s >= hamiltonian.n_sites)
            throw std::invalid_argument("o2 support out of range");
        if (s == o1.site)
            throw std::invalid_argument("o1 and o2 supports must be disjoint");
    }
    if (!(t1 >= 0.0) || !(t2 >= t1))
        throw std::invalid_argument("times must satisfy t2 >= t1 >= 0");
}

QueryCaches make_query_caches(const CorrelationQuery& q,
                              const SpinHamiltonian* h_prime) {
    q.validate();
    QueryCaches caches;
    caches.h = make_evolution_cache(to_dense(q.hamiltonian));
    if (h_prime) {
        if (h_prime->n_sites != q.hamiltonian.n_sites)
            throw std::invalid_argument("h_prime dimension mismatch");
        caches.h_prime = make_evolution_cache(to_dense(*h_prime));
    }
    return caches;
}

// ----------------------------------------------------------------------

cplx exact_two_time(const CorrelationQuery& q, const EvolutionCache& cache) {
    q.validate();
    const Vector psi1 = state_at_t1(q, cache);
    // <sigma psi(t1)| U^dag(dt) O2 U(dt) |psi(t1)>
    Vector left = psi1;
    apply_single_site(pauli_matrix(q.o1.axis), q.o1.site,
                      q.hamiltonian.n_sites, left);
    evolve_inplace(left, cache, q.dt(), Sign::Forward);
    Vector right = psi1;
    evolve_inplace(right, cache, q.dt(), Sign::Forward);
    apply_local(observable_matrix(q.o2), observable_support(q.o2),
                q.hamiltonian.n_sites, right);
    return (left.adjoint() * right)(0, 0);
}

cplx exact_two_time(const CorrelationQuery& q) {
    return exact_two_time(q, make_query_caches(q).h);
}

QuantumState rotated_state(const CorrelationQuery& q, double theta,
                           const EvolutionCache& cache) {
    q.validate();
    Vector v = state_at_t1(q, cache);
    apply_single_site(rotation_gate(q.o1.axis, theta), q.o1.site,
                      q.hamiltonian.n_sites, v);
    evolve_inplace(v, cache, q.dt(), Sign::Forward);
    return QuantumState{q.hamiltonian.n_sites, std::move(v)};
}

QuantumState rotated_state(const CorrelationQuery& q, double theta) {
    return rotated_state(q, theta, make_query_caches(q).h);
}

double rotation_expectation(const CorrelationQuery& q, double theta,
                            const EvolutionCache& cache) {
    const QuantumState s = rotated_state(q, theta, cache);
    return real_expect(s.amplitudes, q.o2, q.hamiltonian.n_sites);
}

double rotation_expectation(const CorrelationQuery& q, double theta) {
    return rotation_expectation(q, theta, make_query_caches(q).h);
}

double im_c_from_rotations(const CorrelationQuery& q, double theta,
                           const EvolutionCache& cache) {
    const double s = std::sin(theta);
    if (std::abs(s) < 1e-6)
        throw std::invalid_argument("im_c_from_rotations: sin(theta) degenerate");
    const double e_minus = rotation_expectation(q, -theta, cache);
    const double e_plus = rotation_expectation(q, theta, cache);
    return (e_minus - e_plus) / (2.0 * s);
}

double im_c_from_rotations(const CorrelationQuery& q, double theta) {
    return im_c_from_rotations(q, theta, make_query_caches(q).h);
}

namespace {

// Sum_nu nu <Pi_nu psi(t1)| U_window^dag O2 U_window |Pi_nu psi(t1)>,
// shared by the projective and modified-projective correlations.
double projective_with_window(const CorrelationQuery& q,
                              const EvolutionCache& cache,
                              const EvolutionCache& window) {
    const Vector psi1 = state_at_t1(q, cache);
    const int n = q.hamiltonian.n_sites;
    double total = 0.0;
    for (int nu : {+1, -1}) {
        Vector proj = psi1;
        const Eigen::Matrix2cd pi =
            0.5 * (Eigen::Matrix2cd::Identity() +
                   static_cast<double>(nu) * pauli_matrix(q.o1.axis));
        apply_single_site(pi, q.o1.site, n, proj);
        evolve_inplace(proj, window, q.dt(), Sign::Forward);
        Vector o2v = proj;
        apply_local(observable_matrix(q.o2), observable_support(q.o2), n, o2v);
        total += nu * (proj.adjoint() * o2v)(0, 0).real();
    }
    return total;
}

}  // namespace

double projective_correlation(const CorrelationQuery& q,
                              const EvolutionCache& cache) {
    q.validate();
    return projective_with_window(q, cache, cache);
}

double projective_correlation(const CorrelationQuery& q) {
    return projective_correlation(q, make_query_caches(q).h);
}

double modified_projective_correlation(const CorrelationQuery& q,
                                       const QueryCaches& caches) {
    q.validate();
    if (!caches.h_prime)
        throw std::invalid_argument("modified correlation requires h_prime cache");
    return projective_with_window(q, caches.h, *caches.h_prime);
}

double modified_projective_correlation(const CorrelationQuery& q,
                                       const SpinHamiltonian& h_prime) {
    return modified_projective_correlation(q, make_query_caches(q, &h_prime));
}

double deferred_correlation(const CorrelationQuery& q,
                            const QueryCaches& caches) {
    q.validate();
    if (!caches.h_prime)
        throw std::invalid_argument("deferred correlation requires h_prime cache");
    // Both measurements at t2: Sum_{nu,omega} nu omega P(nu,omega)
    //   = <chi| sigma_i^a O2 |chi>, chi = U'(dt) U(t1) psi.
    Vector chi = state_at_t1(q, caches.h);
    evolve_inplace(chi, *caches.h_prime, q.dt(), Sign::Forward);
    Vector w = chi;
    apply_single_site(pauli_matrix(q.o1.axis), q.o1.site,
                      q.hamiltonian.n_sites, w);
    apply_local(observable_matrix(q.o2), observable_support(q.o2),
                q.hamiltonian.n_sites, w);
    return (chi.adjoint() * w)(0, 0).real();
}

double deferred_correlation(const CorrelationQuery& q,
                            const SpinHamiltonian& h_prime) {
    return deferred_correlation(q, make_query_caches(q, &h_prime));
}

double scaling_term(const CorrelationQuery& q, const EvolutionCache& cache) {
    q.validate();
    const Vector psi1 = state_at_t1(q, cache);
    const int n = q.hamiltonian.n_sites;
    // <2>: apply sigma at t1, evolve the window, take <O2>
    Vector two = psi1;
    apply_single_site(pauli_matrix(q.o1.axis), q.o1.site, n, two);
    evolve_inplace(two, cache, q.dt(), Sign::Forward);
    // <1>: plain evolution
    Vector one = psi1;
    evolve_inplace(one, cache, q.dt(), Sign::Forward);
    return real_expect(two, q.o2, n) - real_expect(one, q.o2, n);
}

double scaling_term(const CorrelationQuery& q) {
    return scaling_term(q, make_query_caches(q).h);
}

double commutator_norm(const CorrelationQuery& q, const EvolutionCache& cache) {
    q.validate();
    const int n = q.hamiltonian.n_sites;
    const Matrix o2 = embed_local(observable_matrix(q.o2),
                                  observable_support(q.o2), n);
    const Matrix o2_dt = heisenberg_op(o2, cache, q.dt());
    const Matrix sig = embed_local(pauli_matrix(q.o1.axis), {q.o1.site}, n);
    return operator_norm(o2_dt * sig - sig * o2_dt);
}

double commutator_norm(const CorrelationQuery& q) {
    return commutator_norm(q, make_query_caches(q).h);
}

double epsilon_actual(const CorrelationQuery& q, const QueryCaches& caches) {
    const double unmodified = projective_correlation(q, caches.h);
    const double modified = modified_projective_correlation(q, caches);
    return std::abs(unmodified - modified);
}

double epsilon_actual(const CorrelationQuery& q, const SpinHamiltonian& h_prime) {
    return epsilon_actual(q, make_query_caches(q, &h_prime));
}

}  // namespace afmp
