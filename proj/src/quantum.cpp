#include "afmp/quantum.hpp"

#include <algorithm>
#include <cstring>
#include <set>
#include <stdexcept>

namespace afmp {

namespace {

constexpr double kHermTol = 1e-12;

std::uint64_t site_bit(int site, int n_sites) {
    return 1ULL << (n_sites - 1 - site);
}

}  // namespace

Axis axis_from_string(const std::string& s) {
    if (s == "x" || s == "X") return Axis::X;
    if (s == "y" || s == "Y") return Axis::Y;
    if (s == "z" || s == "Z") return Axis::Z;
    throw std::invalid_argument("unknown axis: " + s);
}

const char* axis_to_string(Axis a) {
    switch (a) {
        case Axis::X: return "x";
        case Axis::Y: return "y";
        default: return "z";
    }
}

Eigen::Matrix2cd pauli_matrix(Axis a) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    const cplx i(0.0, 1.0);
    switch (a) {
        case Axis::X:
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            break;
        case Axis::Y:
            m(0, 1) = -i;
            m(1, 0) = i;
            break;
        case Axis::Z:
            m(0, 0) = 1.0;
            m(1, 1) = -1.0;
            break;
    }
    return m;
}

void check_site_count(int n_sites) {
    if (n_sites < 1) throw std::invalid_argument("n_sites must be positive");
    if (n_sites > kMaxSites)
        throw std::invalid_argument("n_sites exceeds dense-matrix guard of " +
                                    std::to_string(kMaxSites));
}

// ----------------------------------------------------------------------
// States

QuantumState QuantumState::basis_state(int n_sites, std::uint64_t index) {
    check_site_count(n_sites);
    const std::size_t dim = 1ULL << n_sites;
    if (index >= dim) throw std::invalid_argument("basis index out of range");
    QuantumState s;
    s.n_sites = n_sites;
    s.amplitudes = Vector::Zero(static_cast<Eigen::Index>(dim));
    s.amplitudes[static_cast<Eigen::Index>(index)] = 1.0;
    return s;
}

QuantumState QuantumState::all_up(int n_sites) { return basis_state(n_sites, 0); }

QuantumState QuantumState::all_plus(int n_sites) {
    check_site_count(n_sites);
    const std::size_t dim = 1ULL << n_sites;
    QuantumState s;
    s.n_sites = n_sites;
    s.amplitudes = Vector::Constant(static_cast<Eigen::Index>(dim),
                                    1.0 / std::sqrt(static_cast<double>(dim)));
    return s;
}

QuantumState QuantumState::random(int n_sites, CounterRng& rng) {
    check_site_count(n_sites);
    const std::size_t dim = 1ULL << n_sites;
    QuantumState s;
    s.n_sites = n_sites;
    s.amplitudes.resize(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k)
        s.amplitudes[static_cast<Eigen::Index>(k)] = cplx(rng.normal(1.0), rng.normal(1.0));
    s.normalize();
    return s;
}

void QuantumState::normalize() {
    const double n = amplitudes.norm();
    if (n < 1e-15) throw std::runtime_error("cannot normalize zero state");
    amplitudes /= n;
}

// ----------------------------------------------------------------------
// Operators and observables

void DenseOperator::validate() const {
    if (hermitian) {
        const double dev = (mat - mat.adjoint()).cwiseAbs().maxCoeff();
        if (dev >= kHermTol)
            throw std::invalid_argument("operator flagged Hermitian is not");
    }
}

DichotomicObservable DichotomicObservable::from_pauli(const PauliObservable& p) {
    DichotomicObservable d;
    d.support = {p.site};
    d.eigenvalue_magnitude = 1.0;
    const Eigen::Matrix2cd sigma = pauli_matrix(p.axis);
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    d.proj_plus = 0.5 * (id + sigma);
    d.proj_minus = 0.5 * (id - sigma);
    return d;
}

void DichotomicObservable::validate() const {
    if (support.empty()) throw std::invalid_argument("empty support");
    if (eigenvalue_magnitude <= 0.0)
        throw std::invalid_argument("eigenvalue magnitude must be positive");
    std::set<int> uniq(support.begin(), support.end());
    if (uniq.size() != support.size())
        throw std::invalid_argument("support sites must be distinct");
    const Eigen::Index d = Eigen::Index(1) << support.size();
    if (proj_plus.rows() != d || proj_minus.rows() != d ||
        proj_plus.cols() != d || proj_minus.cols() != d)
        throw std::invalid_argument("projector dimension mismatch with support");
    const Matrix id = Matrix::Identity(d, d);
    if ((proj_plus + proj_minus - id).cwiseAbs().maxCoeff() > kHermTol)
        throw std::invalid_argument("projectors do not sum to identity");
    if ((proj_plus * proj_plus - proj_plus).cwiseAbs().maxCoeff() > kHermTol ||
        (proj_minus * proj_minus - proj_minus).cwiseAbs().maxCoeff() > kHermTol)
        throw std::invalid_argument("projectors are not idempotent");
    if ((proj_plus * proj_minus).cwiseAbs().maxCoeff() > kHermTol)
        throw std::invalid_argument("projectors are not orthogonal");
}

std::vector<int> observable_support(const Observable& o) {
    if (const auto* p = std::get_if<PauliObservable>(&o)) return {p->site};
    return std::get<DichotomicObservable>(o).support;
}

double observable_eigenvalue(const Observable& o) {
    if (std::holds_alternative<PauliObservable>(o)) return 1.0;
    return std::get<DichotomicObservable>(o).eigenvalue_magnitude;
}

Matrix observable_projector(const Observable& o, int nu) {
    if (const auto* p = std::get_if<PauliObservable>(&o)) {
        const Eigen::Matrix2cd sigma = pauli_matrix(p->axis);
        const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
        return 0.5 * (id + static_cast<double>(nu) * sigma);
    }
    const auto& d = std::get<DichotomicObservable>(o);
    return nu > 0 ? d.proj_plus : d.proj_minus;
}

Matrix observable_matrix(const Observable& o) {
    const double e = observable_eigenvalue(o);
    return e * (observable_projector(o, +1) - observable_projector(o, -1));
}

double observable_norm(const Observable& o) { return observable_eigenvalue(o); }

// ----------------------------------------------------------------------
// Embedding and local application

namespace {

struct SiteMasks {
    std::vector<std::uint64_t> bits;  // full-space bit for each support site
    std::uint64_t rest_mask = 0;      // complement sites

    SiteMasks(const std::vector<int>& sites, int n_sites) {
        check_site_count(n_sites);
        std::set<int> uniq;
        for (int s : sites) {
            if (s < 0 || s >= n_sites)
                throw std::invalid_argument("site index out of range");
            if (!uniq.insert(s).second)
                throw std::invalid_argument("duplicate site in support");
            bits.push_back(site_bit(s, n_sites));
        }
        const std::uint64_t full = (1ULL << n_sites) - 1;
        std::uint64_t support_mask = 0;
        for (auto b : bits) support_mask |= b;
        rest_mask = full & ~support_mask;
    }

    // Sub-space index (site order = order of `sites`) of a full index.
    std::uint64_t sub_index(std::uint64_t idx) const {
        std::uint64_t sub = 0;
        for (std::size_t k = 0; k < bits.size(); ++k)
            if (idx & bits[k]) sub |= 1ULL << (bits.size() - 1 - k);
        return sub;
    }

    // Full index with the support bits replaced by sub-index `sub`.
    std::uint64_t combine(std::uint64_t rest, std::uint64_t sub) const {
        std::uint64_t idx = rest;
        for (std::size_t k = 0; k < bits.size(); ++k)
            if (sub & (1ULL << (bits.size() - 1 - k))) idx |= bits[k];
        return idx;
    }
};

}  // namespace

Matrix embed_local(const Matrix& op, const std::vector<int>& sites, int n_sites) {
    const SiteMasks masks(sites, n_sites);
    const Eigen::Index sub_dim = Eigen::Index(1) << sites.size();
    if (op.rows() != sub_dim || op.cols() != sub_dim)
        throw std::invalid_argument("local operator dimension mismatch");
    const std::size_t dim = 1ULL << n_sites;
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim),
                              static_cast<Eigen::Index>(dim));
    for (std::uint64_t col = 0; col < dim; ++col) {
        const std::uint64_t rest = col & masks.rest_mask;
        const std::uint64_t sub_c = masks.sub_index(col);
        for (std::uint64_t sub_r = 0; sub_r < static_cast<std::uint64_t>(sub_dim); ++sub_r) {
            const cplx v = op(static_cast<Eigen::Index>(sub_r),
                              static_cast<Eigen::Index>(sub_c));
            if (v == cplx(0.0, 0.0)) continue;
            out(static_cast<Eigen::Index>(masks.combine(rest, sub_r)),
                static_cast<Eigen::Index>(col)) = v;
        }
    }
    return out;
}

void apply_local(const Matrix& op, const std::vector<int>& sites, int n_sites,
                 Vector& v) {
    const SiteMasks masks(sites, n_sites);
    const std::uint64_t sub_dim = 1ULL << sites.size();
    if (op.rows() != static_cast<Eigen::Index>(sub_dim))
        throw std::invalid_argument("local operator dimension mismatch");
    const std::size_t dim = 1ULL << n_sites;
    if (v.size() != static_cast<Eigen::Index>(dim))
        throw std::invalid_argument("state dimension mismatch");
    Vector out = Vector::Zero(v.size());
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
        const cplx amp = v[static_cast<Eigen::Index>(idx)];
        if (amp == cplx(0.0, 0.0)) continue;
        const std::uint64_t rest = idx & masks.rest_mask;
        const std::uint64_t sub_c = masks.sub_index(idx);
        for (std::uint64_t sub_r = 0; sub_r < sub_dim; ++sub_r) {
            const cplx m = op(static_cast<Eigen::Index>(sub_r),
                              static_cast<Eigen::Index>(sub_c));
            if (m == cplx(0.0, 0.0)) continue;
            out[static_cast<Eigen::Index>(masks.combine(rest, sub_r))] += m * amp;
        }
    }
    v = std::move(out);
}

void apply_single_site(const Eigen::Matrix2cd& op, int site, int n_sites,
                       Vector& v) {
    if (site < 0 || site >= n_sites)
        throw std::invalid_argument("site index out of range");
    const std::uint64_t bit = site_bit(site, n_sites);
    const std::size_t dim = 1ULL << n_sites;
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
        if (idx & bit) continue;  // handle each (up, down) pair once
        const Eigen::Index iu = static_cast<Eigen::Index>(idx);
        const Eigen::Index id = static_cast<Eigen::Index>(idx | bit);
        const cplx au = v[iu];
        const cplx ad = v[id];
        v[iu] = op(0, 0) * au + op(0, 1) * ad;
        v[id] = op(1, 0) * au + op(1, 1) * ad;
    }
}

// ----------------------------------------------------------------------
// Evolution

std::uint64_t matrix_fingerprint(const Matrix& m) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t x) {
        h ^= x;
        h *= 0x100000001b3ULL;
    };
    mix(static_cast<std::uint64_t>(m.rows()));
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            std::uint64_t re, im;
            const double dre = m(r, c).real(), dim_ = m(r, c).imag();
            std::memcpy(&re, &dre, 8);
            std::memcpy(&im, &dim_, 8);
            mix(re);
            mix(im);
        }
    return h;
}

EvolutionCache make_evolution_cache(const Matrix& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("non-square Hamiltonian");
    const double dev = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (dev >= kHermTol)
        throw std::invalid_argument("Hamiltonian is not Hermitian within 1e-12");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigensolver failed");
    EvolutionCache cache;
    cache.hamiltonian_fingerprint = matrix_fingerprint(h);
    cache.eigenvalues = solver.eigenvalues();
    cache.eigenvectors = solver.eigenvectors();
    return cache;
}

void evolve_inplace(Vector& v, const EvolutionCache& cache, double t, Sign sign) {
    if (!std::isfinite(t)) throw std::invalid_argument("non-finite time");
    if (v.size() != static_cast<Eigen::Index>(cache.dim()))
        throw std::invalid_argument("state/cache dimension mismatch");
    const double s = (sign == Sign::Forward) ? -1.0 : 1.0;
    Vector coeffs = cache.eigenvectors.adjoint() * v;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k)
        coeffs[k] *= std::exp(cplx(0.0, s * cache.eigenvalues[k] * t));
    v = cache.eigenvectors * coeffs;
}

QuantumState evolve(const QuantumState& state, const EvolutionCache& cache,
                    double t, Sign sign) {
    QuantumState out = state;
    evolve_inplace(out.amplitudes, cache, t, sign);
    return out;
}

Matrix propagator(const EvolutionCache& cache, double t, Sign sign) {
    const double s = (sign == Sign::Forward) ? -1.0 : 1.0;
    Vector phases(cache.eigenvalues.size());
    for (Eigen::Index k = 0; k < phases.size(); ++k)
        phases[k] = std::exp(cplx(0.0, s * cache.eigenvalues[k] * t));
    return cache.eigenvectors * phases.asDiagonal() * cache.eigenvectors.adjoint();
}

Matrix heisenberg_op(const Matrix& op, const EvolutionCache& cache, double t) {
    if (op.rows() != static_cast<Eigen::Index>(cache.dim()))
        throw std::invalid_argument("operator/cache dimension mismatch");
    const Matrix u = propagator(cache, t, Sign::Forward);  // e^{-iHt}
    return u.adjoint() * op * u;
}

cplx expectation(const QuantumState& state, const Matrix& op) {
    if (op.rows() != static_cast<Eigen::Index>(state.dim()))
        throw std::invalid_argument("operator/state dimension mismatch");
    return (state.amplitudes.adjoint() * (op * state.amplitudes))(0, 0);
}

double operator_norm(const Matrix& op) {
    if (op.rows() == 0) return 0.0;
    // Largest singular value via the Hermitian spectrum of A^dag A.
    const Matrix gram = op.adjoint() * op;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigensolver failed in operator_norm");
    const double lam = solver.eigenvalues().maxCoeff();
    return std::sqrt(std::max(0.0, lam));
}

// ----------------------------------------------------------------------
// Measurement

BornSample born_sample(const QuantumState& state, const Observable& obs,
                       CounterRng& rng) {
    const std::vector<int> supp = observable_support(obs);
    Vector plus = state.amplitudes;
    apply_local(observable_projector(obs, +1), supp, state.n_sites, plus);
    const double p_plus = plus.squaredNorm();
    Vector minus = state.amplitudes;
    apply_local(observable_projector(obs, -1), supp, state.n_sites, minus);
    const double p_minus = minus.squaredNorm();
    if (p_plus < 1e-15 && p_minus < 1e-15)
        throw std::runtime_error("born_sample: both outcome probabilities vanish");

    BornSample result;
    const double total = p_plus + p_minus;
    const double u = rng.uniform();
    if (u < p_plus / total) {
        result.nu = +1;
        result.probability = p_plus;
        result.post_state = QuantumState{state.n_sites, plus / std::sqrt(p_plus)};
    } else {
        result.nu = -1;
        result.probability = p_minus;
        result.post_state = QuantumState{state.n_sites, minus / std::sqrt(p_minus)};
    }
    result.eigenvalue = result.nu * observable_eigenvalue(obs);
    return result;
}

}  // namespace afmp
