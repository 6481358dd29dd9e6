// Dense complex linear algebra over the 2^N Hilbert space of an N-site
// spin-1/2 lattice: operator embedding, exact unitary evolution via cached
// eigendecompositions, expectation values, Born-rule sampling and spectral
// norms.
//
// Basis convention (fixed throughout): site 0 is the most significant bit
// of the computational basis index, and |up> corresponds to bit value 0.
// The all-up product state is therefore basis index 0.

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "afmp/rng.hpp"

namespace afmp {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Dense 2^N x 2^N matrices beyond this refuse to build.
inline constexpr int kMaxSites = 14;

enum class Axis { X, Y, Z };

Axis axis_from_string(const std::string& s);
const char* axis_to_string(Axis a);

// 2x2 Pauli matrix for the given axis.
Eigen::Matrix2cd pauli_matrix(Axis a);

void check_site_count(int n_sites);

// ----------------------------------------------------------------------
// States

struct QuantumState {
    int n_sites = 0;
    Vector amplitudes;

    static QuantumState basis_state(int n_sites, std::uint64_t index);
    static QuantumState all_up(int n_sites);
    // Uniform |+>^N product state.
    static QuantumState all_plus(int n_sites);
    // Haar-like random state: i.i.d. complex Gaussian amplitudes, normalized.
    static QuantumState random(int n_sites, CounterRng& rng);

    double norm() const { return amplitudes.norm(); }
    void normalize();
    std::size_t dim() const { return static_cast<std::size_t>(amplitudes.size()); }
};

// ----------------------------------------------------------------------
// Operators and observables

struct DenseOperator {
    Matrix mat;
    bool hermitian = false;

    std::size_t dim() const { return static_cast<std::size_t>(mat.rows()); }
    // Throws if the hermitian flag is set but the matrix is not Hermitian
    // within 1e-12 in max-norm.
    void validate() const;
};

struct PauliObservable {
    int site = 0;
    Axis axis = Axis::Z;
};

// +-e valued observable with eigenspace projectors given on the tensor
// subspace of its support sites.
struct DichotomicObservable {
    std::vector<int> support;
    double eigenvalue_magnitude = 1.0;
    Matrix proj_plus;
    Matrix proj_minus;

    static DichotomicObservable from_pauli(const PauliObservable& p);
    // Checks completeness, idempotence and orthogonality of the projectors.
    void validate() const;
};

using Observable = std::variant<PauliObservable, DichotomicObservable>;

std::vector<int> observable_support(const Observable& o);
double observable_eigenvalue(const Observable& o);
// Projector onto the +1 (nu=+1) or -1 eigenspace, on the support subspace.
Matrix observable_projector(const Observable& o, int nu);
// e(P+ - P-) on the support subspace.
Matrix observable_matrix(const Observable& o);
double observable_norm(const Observable& o);

// ----------------------------------------------------------------------
// Embedding and local application

// Tensor-embeds `op` (acting on the ordered site list `sites`) into the
// full 2^n_sites space, identity elsewhere.
Matrix embed_local(const Matrix& op, const std::vector<int>& sites, int n_sites);

// In-place v <- (op on sites) v without forming the embedded matrix.
void apply_local(const Matrix& op, const std::vector<int>& sites, int n_sites,
                 Vector& v);
void apply_single_site(const Eigen::Matrix2cd& op, int site, int n_sites,
                       Vector& v);

// ----------------------------------------------------------------------
// Evolution

enum class Sign { Forward, Backward };  // e^{-iHt} / e^{+iHt}

struct EvolutionCache {
    std::uint64_t hamiltonian_fingerprint = 0;
    Eigen::VectorXd eigenvalues;
    Matrix eigenvectors;

    std::size_t dim() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

std::uint64_t matrix_fingerprint(const Matrix& m);

// Spectral decomposition of a Hermitian matrix; throws on non-Hermitian
// input (tolerance 1e-12).
EvolutionCache make_evolution_cache(const Matrix& h);

QuantumState evolve(const QuantumState& state, const EvolutionCache& cache,
                    double t, Sign sign = Sign::Forward);
void evolve_inplace(Vector& v, const EvolutionCache& cache, double t,
                    Sign sign = Sign::Forward);

// Dense e^{-iHt} (Forward) or e^{+iHt} (Backward).
Matrix propagator(const EvolutionCache& cache, double t, Sign sign = Sign::Forward);

// Heisenberg picture O(t) = e^{iHt} O e^{-iHt}.
Matrix heisenberg_op(const Matrix& op, const EvolutionCache& cache, double t);

cplx expectation(const QuantumState& state, const Matrix& op);

// Largest singular value; equals max |eigenvalue| for Hermitian input.
double operator_norm(const Matrix& op);

// ----------------------------------------------------------------------
// Measurement

struct BornSample {
    double eigenvalue = 0.0;   // +-1 for Pauli, +-e for dichotomic
    int nu = 0;                // sign of the outcome
    double probability = 0.0;
    QuantumState post_state;
};

// Projective measurement of `obs` on `state`. Throws if both outcome
// probabilities are below 1e-15 (numerically invalid state).
BornSample born_sample(const QuantumState& state, const Observable& obs,
                       CounterRng& rng);

}  // namespace afmp
